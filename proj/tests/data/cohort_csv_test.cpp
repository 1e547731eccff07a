#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "trajbench/cohort_csv.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/generator.hpp"
#include "trajbench/text.hpp"

using namespace trajbench;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/trajbench_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("text helpers: shortest round-trip doubles and CSV framing") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-3.0) == "-3");
    CHECK(format_double(466.40) == "466.4");
    const double awkward = 0.1 + 0.2;
    CHECK(parse_double(format_double(awkward)).value() == awkward);
    CHECK_THROWS_AS(format_double(std::nan("")), NumericError);

    CHECK_FALSE(parse_double("").has_value());
    CHECK_FALSE(parse_double("1.5x").has_value());
    CHECK(parse_integer("42").value() == 42);
    CHECK_FALSE(parse_integer("4.2").has_value());

    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("(0, 8.4)") == "\"(0, 8.4)\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    auto fields = csv_split("a,\"(0, 8.4)\",c");
    REQUIRE(fields.size() == 3);
    CHECK(fields[1] == "(0, 8.4)");
    auto quoted = csv_split("\"say \"\"hi\"\"\",x");
    CHECK(quoted[0] == "say \"hi\"");
}

TEST_CASE("write/load round trip is lossless and canonical re-write is byte-identical") {
    GeneratorSpec spec = default_generator_spec("hypotension", 6);
    spec.schema.sequence_length = 8;  // keep the file small
    Cohort original = generate_synthetic_cohort(spec, 11);

    TempFile file("roundtrip.csv");
    write_cohort_csv(original, file.path);
    Cohort loaded = load_cohort_csv(file.path, spec.schema);

    REQUIRE(loaded.size() == original.size());
    for (std::size_t p = 0; p < original.size(); ++p) {
        CHECK(loaded.patients[p].patient_id == original.patients[p].patient_id);
        CHECK(loaded.patients[p].numeric_values == original.patients[p].numeric_values);
        CHECK(loaded.patients[p].categorical_values == original.patients[p].categorical_values);
    }

    TempFile second("roundtrip2.csv");
    write_cohort_csv(loaded, second.path);
    CHECK(read_file(file.path) == read_file(second.path));

    // Quoted dose-bin labels survive the trip.
    const std::string text = read_file(file.path);
    CHECK(text.find("patient_id,step,MAP,Urine,Lactate,Vasopressors,Fluid Boluses\n") == 0);
    if (text.find("\"(0, 8.4)\"") == std::string::npos) {
        // Not guaranteed for every seed, but the label set makes it likely;
        // at minimum no unquoted comma-label may appear.
        CHECK(text.find(",(0,") == std::string::npos);
    }
}

TEST_CASE("row order in the file does not matter, patient order is first appearance") {
    FeatureSchema schema = make_schema("art_hiv");
    schema.sequence_length = 2;
    const std::string header = cohort_csv_header(schema);
    TempFile file("shuffled.csv");
    write_file(file.path,
               header +
                   "\n"
                   "B,2,100,200,FTC + TDF,DTG,DRV\n"
                   "A,1,10,20,Other,RAL,RTV\n"
                   "B,1,1,2,FTC + TDF,DTG,DRV\n"
                   "A,2,30,40,Other,RAL,RTV\n");
    Cohort cohort = load_cohort_csv(file.path, schema);
    REQUIRE(cohort.size() == 2);
    CHECK(cohort.patients[0].patient_id == "B");
    CHECK(cohort.patients[1].patient_id == "A");
    CHECK(cohort.numeric_at(0, 0, 0) == 1.0);    // B step 1
    CHECK(cohort.numeric_at(0, 1, 0) == 100.0);  // B step 2
    CHECK(cohort.categorical_at(1, 0, 1) == 1);  // A: "RAL"
}

TEST_CASE("ingest errors name the file, line and column") {
    FeatureSchema schema = make_schema("art_hiv");
    schema.sequence_length = 1;
    const std::string header = cohort_csv_header(schema);
    TempFile file("bad.csv");

    write_file(file.path, "wrong,header\n");
    CHECK_THROWS_WITH_AS(load_cohort_csv(file.path, schema), doctest::Contains("header"), IngestError);

    write_file(file.path, header + "\nA,1,10,20,Other,RAL\n");
    CHECK_THROWS_WITH_AS(load_cohort_csv(file.path, schema), doctest::Contains("line 2"), IngestError);

    write_file(file.path, header + "\nA,1,ten,20,Other,RAL,RTV\n");
    CHECK_THROWS_WITH_AS(load_cohort_csv(file.path, schema),
                         doctest::Contains("\"Viral Load\""), IngestError);

    write_file(file.path, header + "\nA,1,10,20,Other,NOPE,RTV\n");
    CHECK_THROWS_WITH_AS(load_cohort_csv(file.path, schema), doctest::Contains("NOPE"), IngestError);

    write_file(file.path, header + "\nA,0,10,20,Other,RAL,RTV\n");
    CHECK_THROWS_AS(load_cohort_csv(file.path, schema), IngestError);

    // Duplicate step.
    write_file(file.path, header + "\nA,1,10,20,Other,RAL,RTV\nA,1,10,20,Other,RAL,RTV\n");
    CHECK_THROWS_WITH_AS(load_cohort_csv(file.path, schema), doctest::Contains("duplicate"), IngestError);

    // Missing step 2 of 2.
    FeatureSchema two = make_schema("art_hiv");
    two.sequence_length = 2;
    write_file(file.path, cohort_csv_header(two) + "\nA,1,10,20,Other,RAL,RTV\n");
    CHECK_THROWS_AS(load_cohort_csv(file.path, two), IngestError);

    CHECK_THROWS_WITH_AS(load_cohort_csv("/nonexistent/x.csv", schema),
                         doctest::Contains("x.csv"), IngestError);
}

TEST_CASE("subset_cohort keeps the requested patients in the requested order") {
    GeneratorSpec spec = default_generator_spec("art_hiv", 4);
    spec.schema.sequence_length = 3;
    Cohort cohort = generate_synthetic_cohort(spec, 5);

    Cohort sub = subset_cohort(cohort, {"P000003", "P000001"});
    REQUIRE(sub.size() == 2);
    CHECK(sub.patients[0].patient_id == "P000003");
    CHECK(sub.patients[1].patient_id == "P000001");
    CHECK(sub.patients[1].numeric_values == cohort.patients[0].numeric_values);
    CHECK_THROWS_AS(subset_cohort(cohort, {"P000009"}), ContractError);
}
