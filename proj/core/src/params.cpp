#include "trajbench/params.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "trajbench/errors.hpp"
#include "trajbench/hash.hpp"

namespace trajbench {

namespace {

constexpr char kMagic[8] = {'T', 'B', 'P', 'A', 'R', 'A', 'M', 'S'};
constexpr std::uint32_t kVersion = 1;

nlohmann::ordered_json config_to_json(const ModelConfig& cfg) {
    nlohmann::ordered_json j;
    j["kind"] = model_kind_name(cfg.kind);
    j["input_dim"] = cfg.input_dim;
    j["hidden_dim"] = cfg.hidden_dim;
    j["layers"] = cfg.layers;
    j["heads"] = cfg.heads;
    j["ffn_dim"] = cfg.ffn_dim;
    j["max_positions"] = cfg.max_positions;
    j["seed"] = cfg.seed;
    return j;
}

ModelConfig config_from_json(const nlohmann::ordered_json& j) {
    ModelConfig cfg;
    cfg.kind = parse_model_kind(j.at("kind").get<std::string>());
    cfg.input_dim = j.at("input_dim").get<std::size_t>();
    cfg.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    cfg.layers = j.at("layers").get<std::size_t>();
    cfg.heads = j.at("heads").get<std::size_t>();
    cfg.ffn_dim = j.at("ffn_dim").get<std::size_t>();
    cfg.max_positions = j.at("max_positions").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IngestError("\"" + path + "\": truncated parameter file");
    return value;
}

}  // namespace

Tensor& ParamStore::add(const std::string& name, Shape shape) {
    if (by_name_.count(name)) throw ContractError("param store: duplicate tensor name \"" + name + "\"");
    Tensor t = Tensor::zeros(std::move(shape));
    t.set_requires_grad(true);
    names_.push_back(name);
    trainable_[name] = true;
    return by_name_.emplace(name, std::move(t)).first->second;
}

Tensor& ParamStore::add_buffer(const std::string& name, Shape shape) {
    if (by_name_.count(name)) throw ContractError("param store: duplicate tensor name \"" + name + "\"");
    Tensor t = Tensor::zeros(std::move(shape));
    names_.push_back(name);
    trainable_[name] = false;
    return by_name_.emplace(name, std::move(t)).first->second;
}

bool ParamStore::has(const std::string& name) const { return by_name_.count(name) > 0; }

Tensor& ParamStore::get(const std::string& name) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw ContractError("param store: unknown tensor \"" + name + "\"");
    return it->second;
}

const Tensor& ParamStore::get(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw ContractError("param store: unknown tensor \"" + name + "\"");
    return it->second;
}

bool ParamStore::is_trainable(const std::string& name) const {
    auto it = trainable_.find(name);
    if (it == trainable_.end()) throw ContractError("param store: unknown tensor \"" + name + "\"");
    return it->second;
}

std::vector<Tensor> ParamStore::trainable_tensors() const {
    std::vector<Tensor> out;
    out.reserve(names_.size());
    for (const auto& name : names_) {
        if (trainable_.at(name)) out.push_back(by_name_.at(name));
    }
    return out;
}

std::size_t ParamStore::total_parameters() const {
    std::size_t total = 0;
    for (const auto& name : names_) {
        if (trainable_.at(name)) total += by_name_.at(name).numel();
    }
    return total;
}

std::uint64_t ParamStore::checksum() const {
    Fnv1a64 hash;
    for (const auto& name : names_) {
        const Tensor& t = by_name_.at(name);
        hash.update(name);
        hash.update("\0", 1);
        const std::uint64_t rank = t.shape().size();
        hash.update(&rank, sizeof(rank));
        for (std::size_t d : t.shape()) {
            const std::uint64_t dim = d;
            hash.update(&dim, sizeof(dim));
        }
        const auto values = t.values();
        hash.update(values.data(), values.size() * sizeof(double));
    }
    return hash.digest();
}

void save_params(const ParamStore& store, const ModelConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write \"" + path + "\"");
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);

    const std::string config_json = config_to_json(config).dump();
    write_pod(out, static_cast<std::uint64_t>(config_json.size()));
    out.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));

    write_pod(out, static_cast<std::uint64_t>(store.names().size()));
    for (const auto& name : store.names()) {
        const Tensor& t = store.get(name);
        write_pod(out, static_cast<std::uint64_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod(out, static_cast<std::uint8_t>(store.is_trainable(name) ? 1 : 0));
        write_pod(out, static_cast<std::uint64_t>(t.shape().size()));
        for (std::size_t d : t.shape()) write_pod(out, static_cast<std::uint64_t>(d));
        const auto values = t.values();
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
    }
    if (!out) throw IngestError("failed while writing \"" + path + "\"");
}

LoadedParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open \"" + path + "\"");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IngestError("\"" + path + "\": not a parameter file (bad magic)");
    }
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != kVersion) {
        throw IngestError("\"" + path + "\": unsupported parameter file version " + std::to_string(version));
    }

    const auto json_len = read_pod<std::uint64_t>(in, path);
    std::string config_json(json_len, '\0');
    in.read(config_json.data(), static_cast<std::streamsize>(json_len));
    if (!in) throw IngestError("\"" + path + "\": truncated parameter file");

    LoadedParams loaded;
    try {
        loaded.config = config_from_json(nlohmann::ordered_json::parse(config_json));
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("\"" + path + "\": bad config header: " + e.what());
    }

    const auto tensor_count = read_pod<std::uint64_t>(in, path);
    for (std::uint64_t k = 0; k < tensor_count; ++k) {
        const auto name_len = read_pod<std::uint64_t>(in, path);
        std::string name(name_len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(name_len));
        if (!in) throw IngestError("\"" + path + "\": truncated parameter file");
        const auto trainable = read_pod<std::uint8_t>(in, path);
        const auto rank = read_pod<std::uint64_t>(in, path);
        Shape shape(rank);
        std::size_t numel = 1;
        for (auto& d : shape) {
            d = static_cast<std::size_t>(read_pod<std::uint64_t>(in, path));
            numel *= d;
        }
        Tensor& t = trainable ? loaded.store.add(name, shape) : loaded.store.add_buffer(name, shape);
        auto values = t.values_mut();
        in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(numel * sizeof(double)));
        if (!in) throw IngestError("\"" + path + "\": truncated parameter file");
    }
    return loaded;
}

}  // namespace trajbench
