#pragma once

#include <string>

#include "trajbench/heads.hpp"
#include "trajbench/lstm.hpp"
#include "trajbench/model_config.hpp"
#include "trajbench/params.hpp"
#include "trajbench/schema.hpp"
#include "trajbench/transformer.hpp"

namespace trajbench {

struct Model {
    ModelConfig config;
    FeatureSchema schema;
    ParamStore params;
};

// Builds a model with freshly initialized parameters (deterministic in
// config.seed). input_dim must equal encoded_dim(schema).
Model make_model(const ModelConfig& config, const FeatureSchema& schema);

// Closed-form trainable parameter count implied by the configuration.
std::size_t expected_param_count(const ModelConfig& config, const FeatureSchema& schema);

void save_model(const Model& model, const std::string& path);

// Loads parameters and validates every expected tensor name and shape
// against the embedded configuration.
Model load_model(const std::string& path, const FeatureSchema& schema);

}  // namespace trajbench
