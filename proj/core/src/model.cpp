#include "trajbench/model.hpp"

#include "trajbench/encoding.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/rng.hpp"

namespace trajbench {

Model make_model(const ModelConfig& config, const FeatureSchema& schema) {
    config.validate();
    schema.validate();
    if (config.input_dim != encoded_dim(schema)) {
        throw ConfigError("model: input_dim (" + std::to_string(config.input_dim) +
                          ") must equal the encoded step width (" + std::to_string(encoded_dim(schema)) + ")");
    }
    Model model;
    model.config = config;
    model.schema = schema;
    Rng init_stream(derive_seed(config.seed, "param-init"));
    if (config.kind == ModelKind::LstmSeq2Seq) {
        add_lstm_params(model.params, config, schema, init_stream);
    } else {
        add_transformer_params(model.params, config, schema, init_stream);
    }
    return model;
}

std::size_t expected_param_count(const ModelConfig& config, const FeatureSchema& schema) {
    return config.kind == ModelKind::LstmSeq2Seq ? lstm_param_count(config, schema)
                                                 : transformer_param_count(config, schema);
}

void save_model(const Model& model, const std::string& path) {
    save_params(model.params, model.config, path);
}

Model load_model(const std::string& path, const FeatureSchema& schema) {
    LoadedParams loaded = load_params(path);
    const Model reference = make_model(loaded.config, schema);
    for (const auto& name : reference.params.names()) {
        if (!loaded.store.has(name)) {
            throw IngestError("\"" + path + "\": missing parameter tensor \"" + name + "\"");
        }
        if (loaded.store.get(name).shape() != reference.params.get(name).shape()) {
            throw IngestError("\"" + path + "\": shape mismatch for tensor \"" + name + "\"");
        }
    }
    for (const auto& name : loaded.store.names()) {
        if (name == "residual_std") {
            const Shape expected{1, schema.numeric_count()};
            if (loaded.store.get(name).shape() != expected) {
                throw IngestError("\"" + path + "\": shape mismatch for tensor \"residual_std\"");
            }
            continue;
        }
        if (!reference.params.has(name)) {
            throw IngestError("\"" + path + "\": unexpected parameter tensor \"" + name + "\"");
        }
    }
    Model model;
    model.config = loaded.config;
    model.schema = schema;
    model.params = std::move(loaded.store);
    return model;
}

}  // namespace trajbench
