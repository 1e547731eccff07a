#pragma once

#include <cstdint>
#include <string>

namespace trajbench {

enum class ModelKind { LstmSeq2Seq, EthosLite };

const char* model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ModelConfig {
    ModelKind kind = ModelKind::LstmSeq2Seq;
    std::size_t input_dim = 0;      // D from encode_visits
    std::size_t hidden_dim = 64;
    std::size_t layers = 1;         // 1 LSTM layer / 2 transformer blocks
    std::size_t heads = 4;          // transformer only
    std::size_t ffn_dim = 256;      // transformer only, 4x expansion
    std::size_t max_positions = 0;  // observation_length + prediction_length
    std::uint64_t seed = 0;

    void validate() const;
};

// The shipped per-architecture configuration for a dataset geometry.
ModelConfig default_model_config(ModelKind kind, std::size_t input_dim, std::size_t max_positions,
                                 std::uint64_t seed);

}  // namespace trajbench
