#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "trajbench/model_config.hpp"
#include "trajbench/tensor.hpp"

namespace trajbench {

// Ordered collection of named parameter tensors. Trainable entries feed the
// optimizer; buffers (e.g. residual-noise scales estimated after training)
// are carried through serialization but never receive gradients.
class ParamStore {
public:
    Tensor& add(const std::string& name, Shape shape);         // trainable, zero-initialized
    Tensor& add_buffer(const std::string& name, Shape shape);  // non-trainable

    bool has(const std::string& name) const;
    Tensor& get(const std::string& name);
    const Tensor& get(const std::string& name) const;
    bool is_trainable(const std::string& name) const;

    const std::vector<std::string>& names() const { return names_; }
    std::vector<Tensor> trainable_tensors() const;
    std::size_t total_parameters() const;  // trainable element count
    std::uint64_t checksum() const;        // over names, shapes, and contents

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Tensor> by_name_;
    std::unordered_map<std::string, bool> trainable_;
};

void save_params(const ParamStore& store, const ModelConfig& config, const std::string& path);

struct LoadedParams {
    ParamStore store;
    ModelConfig config;
};

LoadedParams load_params(const std::string& path);

}  // namespace trajbench
