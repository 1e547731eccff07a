#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "trajbench/encoding.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/model.hpp"
#include "trajbench/params.hpp"

using namespace trajbench;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/trajbench_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

FeatureSchema tiny_schema() {
    FeatureSchema s;
    s.dataset_id = "tiny";
    s.numeric_features = {{"a", "u", false}, {"b", "u", false}};
    s.categorical_features = {{"c", {"x", "y"}}};
    s.sequence_length = 9;
    return s;
}

ModelConfig tiny_config() {
    ModelConfig cfg;
    cfg.kind = ModelKind::LstmSeq2Seq;
    cfg.input_dim = encoded_dim(tiny_schema());  // 2 + 2 + 1 = 5
    cfg.hidden_dim = 4;
    cfg.max_positions = 9;
    cfg.seed = 12;
    return cfg;
}

}  // namespace

TEST_CASE("store bookkeeping: order, trainability, duplicates") {
    ParamStore store;
    Tensor& w = store.add("w", {2, 3});
    store.add_buffer("buf", {1, 2});
    store.add("v", {4});

    CHECK(store.names() == std::vector<std::string>{"w", "buf", "v"});
    CHECK(store.has("w"));
    CHECK_FALSE(store.has("nope"));
    CHECK(store.is_trainable("w"));
    CHECK_FALSE(store.is_trainable("buf"));
    CHECK(store.total_parameters() == 6 + 4);
    CHECK(store.trainable_tensors().size() == 2);
    CHECK(w.requires_grad());
    CHECK_FALSE(store.get("buf").requires_grad());

    CHECK_THROWS_AS(store.add("w", {1}), ContractError);
    CHECK_THROWS_AS(store.get("nope"), ContractError);
    CHECK_THROWS_AS(store.is_trainable("nope"), ContractError);
}

TEST_CASE("checksum tracks names, shapes and contents") {
    ParamStore a;
    a.add("w", {2, 2});
    ParamStore b;
    b.add("w", {2, 2});
    CHECK(a.checksum() == b.checksum());

    b.get("w").values_mut()[0] = 1.0;
    CHECK(a.checksum() != b.checksum());

    ParamStore c;
    c.add("w", {4});
    CHECK(a.checksum() != c.checksum());

    ParamStore d;
    d.add("x", {2, 2});
    CHECK(a.checksum() != d.checksum());
}

TEST_CASE("save/load round trip preserves everything") {
    const FeatureSchema schema = tiny_schema();
    Model model = make_model(tiny_config(), schema);
    Tensor& buf = model.params.add_buffer("residual_std", {1, 2});
    buf.values_mut()[0] = 0.5;
    buf.values_mut()[1] = 0.25;

    TempFile file("params.bin");
    save_model(model, file.path);

    LoadedParams loaded = load_params(file.path);
    CHECK(loaded.config.kind == ModelKind::LstmSeq2Seq);
    CHECK(loaded.config.input_dim == 5);
    CHECK(loaded.config.seed == 12);
    CHECK(loaded.store.names() == model.params.names());
    CHECK(loaded.store.checksum() == model.params.checksum());
    CHECK_FALSE(loaded.store.is_trainable("residual_std"));
    CHECK(loaded.store.is_trainable("cell.wx"));

    Model reloaded = load_model(file.path, schema);
    CHECK(reloaded.params.checksum() == model.params.checksum());
    CHECK(reloaded.config.hidden_dim == 4);
}

TEST_CASE("corrupt files are rejected with the path in the message") {
    TempFile file("bad_params.bin");

    {
        std::ofstream out(file.path, std::ios::binary);
        out << "NOTPARAM";
    }
    CHECK_THROWS_WITH_AS(load_params(file.path), doctest::Contains("bad magic"), IngestError);

    const FeatureSchema schema = tiny_schema();
    Model model = make_model(tiny_config(), schema);
    save_model(model, file.path);
    {
        // Truncate the tail.
        std::ifstream in(file.path, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size() / 2));
    }
    CHECK_THROWS_WITH_AS(load_params(file.path), doctest::Contains("truncated"), IngestError);

    CHECK_THROWS_AS(load_params("/nonexistent/params.bin"), IngestError);
}

TEST_CASE("load_model validates the tensor inventory against the configuration") {
    const FeatureSchema schema = tiny_schema();
    Model model = make_model(tiny_config(), schema);
    TempFile file("inventory.bin");

    // Missing tensor.
    {
        ParamStore partial;
        partial.add("cell.wx", {5, 16});
        save_params(partial, model.config, file.path);
    }
    CHECK_THROWS_WITH_AS(load_model(file.path, schema), doctest::Contains("missing parameter"),
                         IngestError);

    // Unexpected extra tensor (anything but the residual buffer).
    {
        ParamStore extra = std::move(make_model(tiny_config(), schema).params);
        extra.add("mystery", {1});
        save_params(extra, model.config, file.path);
    }
    CHECK_THROWS_WITH_AS(load_model(file.path, schema), doctest::Contains("unexpected"), IngestError);

    // Wrong shape for a known tensor: store a mismatched hidden size.
    {
        ModelConfig other = tiny_config();
        other.hidden_dim = 8;
        Model wide = make_model(other, schema);
        save_params(wide.params, model.config, file.path);  // header says hidden 4
    }
    CHECK_THROWS_WITH_AS(load_model(file.path, schema), doctest::Contains("shape mismatch"),
                         IngestError);

    // residual_std with the wrong width.
    {
        Model ok = make_model(tiny_config(), schema);
        ok.params.add_buffer("residual_std", {1, 3});
        save_model(ok, file.path);
    }
    CHECK_THROWS_WITH_AS(load_model(file.path, schema), doctest::Contains("residual_std"), IngestError);
}
