#include "trajbench/model_config.hpp"

#include "trajbench/errors.hpp"

namespace trajbench {

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::LstmSeq2Seq: return "lstm_seq2seq";
        case ModelKind::EthosLite: return "ethos_lite";
    }
    throw ContractError("model_kind_name: unknown kind");
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "lstm_seq2seq") return ModelKind::LstmSeq2Seq;
    if (name == "ethos_lite") return ModelKind::EthosLite;
    throw ConfigError("unknown model kind \"" + name + "\" (expected lstm_seq2seq or ethos_lite)");
}

void ModelConfig::validate() const {
    if (input_dim == 0 || hidden_dim == 0 || layers == 0 || max_positions == 0) {
        throw ConfigError("model: dimensions must be positive");
    }
    if (kind == ModelKind::EthosLite) {
        if (heads == 0 || ffn_dim == 0) throw ConfigError("model: transformer heads/ffn_dim must be positive");
        if (hidden_dim % heads != 0) {
            throw ConfigError("model: hidden_dim (" + std::to_string(hidden_dim) +
                              ") must be divisible by heads (" + std::to_string(heads) + ")");
        }
    }
}

ModelConfig default_model_config(ModelKind kind, std::size_t input_dim, std::size_t max_positions,
                                 std::uint64_t seed) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.input_dim = input_dim;
    cfg.hidden_dim = 64;
    cfg.layers = kind == ModelKind::LstmSeq2Seq ? 1 : 2;
    cfg.heads = 4;
    cfg.ffn_dim = 256;
    cfg.max_positions = max_positions;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

}  // namespace trajbench
