#include "trajbench/gaps.hpp"

#include "trajbench/errors.hpp"

namespace trajbench {

void IrregularitySpec::validate() const {
    if (g_max < 1) throw ConfigError("irregularity: g_max must be >= 1");
}

std::vector<std::size_t> compute_delta_t(const std::vector<std::size_t>& retained) {
    if (retained.empty() || retained.front() != 1) {
        throw ContractError("compute_delta_t: retained indices must start at step 1");
    }
    std::vector<std::size_t> delta(retained.size(), 0);
    for (std::size_t k = 1; k < retained.size(); ++k) {
        if (retained[k] <= retained[k - 1]) {
            throw ContractError("compute_delta_t: retained indices must be strictly increasing");
        }
        delta[k] = retained[k] - retained[k - 1];
    }
    return delta;
}

VisitIndexSet sample_gaps(std::size_t observation_length, const IrregularitySpec& spec, Rng& stream) {
    spec.validate();
    if (observation_length < 1) throw ContractError("sample_gaps: observation_length must be >= 1");
    VisitIndexSet visits;
    visits.retained.push_back(1);
    std::size_t t = 1;
    while (true) {
        const std::size_t g = static_cast<std::size_t>(
            stream.uniform_int(1, static_cast<std::int64_t>(spec.g_max)));
        if (t + g > observation_length) break;
        t += g;
        visits.retained.push_back(t);
    }
    visits.delta_t = compute_delta_t(visits.retained);
    return visits;
}

VisitIndexSet complete_visits(std::size_t observation_length) {
    if (observation_length < 1) throw ContractError("complete_visits: observation_length must be >= 1");
    VisitIndexSet visits;
    visits.retained.resize(observation_length);
    for (std::size_t k = 0; k < observation_length; ++k) visits.retained[k] = k + 1;
    visits.delta_t = compute_delta_t(visits.retained);
    return visits;
}

}  // namespace trajbench
