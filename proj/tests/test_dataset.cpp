#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "gafill/dataset.hpp"
#include "gafill/errors.hpp"
#include "gafill/schema.hpp"

using namespace gafill;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = std::string("/tmp/gafill_test_") + name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string reference_header() {
    std::string h;
    const auto schema = reference_schema();
    for (std::size_t i = 0; i < schema.variables.size(); ++i) {
        if (i) h += ",";
        h += schema.variables[i].name;
    }
    return h;
}

// A complete, in-range record in reference schema order:
// Age Group,Education,Parity,Gravidity,Age Gap,HIV Status,Race,Province,
// Region,RPR,WTREV
const char* kRow = "25,8,1,2,3,0,1,4,12,0,0.9";

} // namespace

TEST_CASE("normalize maps schema bounds to the unit interval") {
    auto schema = reference_schema();
    DataMatrix m(3, schema.dimension(), Space::Raw);
    m.values.setZero();
    for (int j = 0; j < schema.dimension(); ++j) {
        m.values(0, j) = schema.variables[j].min;
        m.values(1, j) = schema.variables[j].max;
        m.values(2, j) = schema.variables[j].min;
    }
    int age = schema.index_of("Age Group");
    m.values(2, age) = 37.0; // midpoint of [14, 60]
    auto n = normalize(m, schema);
    CHECK(n.space == Space::Normalized);
    for (int j = 0; j < schema.dimension(); ++j) {
        CHECK(n.values(0, j) == 0.0);
        CHECK(n.values(1, j) == 1.0);
    }
    CHECK(n.values(2, age) == 0.5);
}

TEST_CASE("normalize refuses out-of-range values") {
    auto schema = reference_schema();
    DataMatrix m(1, schema.dimension(), Space::Raw);
    for (int j = 0; j < schema.dimension(); ++j)
        m.values(0, j) = schema.variables[j].min;
    m.values(0, schema.index_of("Age Group")) = 75.0;
    CHECK_THROWS_AS(normalize(m, schema), DataError);
}

TEST_CASE("denormalize inverts normalize and rounds discrete variables") {
    auto schema = reference_schema();
    int age = schema.index_of("Age Group");
    int hiv = schema.index_of("HIV Status");
    int wt = schema.index_of("WTREV");

    DataMatrix m(2, schema.dimension(), Space::Normalized);
    m.values.setConstant(0.5);
    m.values(0, hiv) = 0.49;
    m.values(1, hiv) = 0.51;
    auto raw = denormalize(m, schema);
    CHECK(raw.space == Space::Raw);
    CHECK(raw.values(0, age) == 37.0);
    CHECK(raw.values(0, hiv) == 0.0);
    CHECK(raw.values(1, hiv) == 1.0);
    // continuous columns are not rounded
    const auto& w = schema.variables[wt];
    CHECK(raw.values(0, wt) == doctest::Approx(w.min + 0.5 * (w.max - w.min)).epsilon(1e-12));
}

TEST_CASE("normalize then denormalize is the identity on integer records") {
    auto schema = reference_schema();
    DataMatrix m(1, schema.dimension(), Space::Raw);
    int j = 0;
    for (const auto& v : schema.variables) {
        double mid = v.is_discrete() ? std::floor((v.min + v.max) / 2.0)
                                     : (v.min + v.max) / 2.0;
        m.values(0, j++) = mid;
    }
    auto round_trip = denormalize(normalize(m, schema), schema);
    for (int c = 0; c < schema.dimension(); ++c)
        CHECK(round_trip.values(0, c) == doctest::Approx(m.values(0, c)).epsilon(1e-12));
}

TEST_CASE("denormalize_value clamps rounded integers into range") {
    VariableSpec v;
    v.name = "G";
    v.kind = VariableKind::Integer;
    v.min = 0;
    v.max = 11;
    CHECK(denormalize_value(0.0, v) == 0.0);
    CHECK(denormalize_value(1.0, v) == 11.0);
    CHECK(denormalize_value(1.4, v) == 11.0);  // out-of-box gene still lands in range
    CHECK(denormalize_value(-0.2, v) == 0.0);
    CHECK(denormalize_value(0.5, v) == 6.0);   // 5.5 rounds half-up
}

TEST_CASE("load_csv parses values, categories, and missing cells") {
    auto schema = reference_schema();
    std::string text = reference_header() + "\n";
    text += std::string(kRow) + "\n";
    text += std::string(kRow) + "\n";
    text += "25,8,1,2,3,0,1,4,,0,0.9\n"; // empty Region
    auto path = write_temp("load.csv", text);

    auto result = load_csv(path, schema);
    CHECK(result.data.rows() == 3);
    CHECK(result.data.cols() == schema.dimension());
    CHECK(result.issues.empty());
    CHECK(result.data.mask(0, 0));
    CHECK_FALSE(result.data.mask(2, schema.index_of("Region")));
    CHECK(result.data.values(0, schema.index_of("Education")) == 8.0);
    std::remove(path.c_str());
}

TEST_CASE("load_csv reports unparseable cells as issues and masks them") {
    auto schema = reference_schema();
    std::string text = reference_header() + "\n";
    text += "25,eight,1,2,3,0,1,4,12,0,0.9\n";
    auto path = write_temp("bad_cell.csv", text);

    auto result = load_csv(path, schema);
    REQUIRE(result.issues.size() == 1);
    CHECK(result.issues[0].row == 0);
    CHECK(result.issues[0].column == schema.index_of("Education"));
    CHECK(result.issues[0].content == "eight");
    CHECK_FALSE(result.data.mask(0, schema.index_of("Education")));
    std::remove(path.c_str());
}

TEST_CASE("load_csv rejects a header that does not match the schema") {
    auto schema = reference_schema();
    std::string text = reference_header();
    auto pos = text.find("Education");
    text.replace(pos, 9, "Schooling");
    text += "\n" + std::string(kRow) + "\n";
    auto path = write_temp("bad_header.csv", text);

    try {
        load_csv(path, schema);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        // the first mismatching column is named
        CHECK(std::string(e.what()).find("Education") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("load_csv rejects rows with the wrong number of cells") {
    auto schema = reference_schema();
    std::string text = reference_header() + "\n25,8,1\n";
    auto path = write_temp("short_row.csv", text);
    CHECK_THROWS_AS(load_csv(path, schema), DataError);
    std::remove(path.c_str());
}

TEST_CASE("load_csv rejects a missing file") {
    CHECK_THROWS_AS(load_csv("/tmp/gafill_no_such_file.csv", reference_schema()),
                    DataError);
}

TEST_CASE("save_csv round-trips values and missing cells") {
    auto schema = reference_schema();
    auto data = synthesize(schema, 20, 9);
    data.mask(3, 2) = false;
    data.mask(7, 10) = false;
    auto path = write_temp("round.csv", "");
    save_csv(data, schema, path);
    auto back = load_csv(path, schema);
    REQUIRE(back.data.rows() == data.rows());
    for (long i = 0; i < data.rows(); ++i)
        for (int j = 0; j < data.cols(); ++j) {
            CHECK(back.data.mask(i, j) == data.mask(i, j));
            if (data.mask(i, j))
                CHECK(back.data.values(i, j) == data.values(i, j));
        }
    std::remove(path.c_str());
}

TEST_CASE("screen_outliers masks out-of-range cells and keeps rows") {
    auto schema = reference_schema();
    int age = schema.index_of("Age Group");
    int wt = schema.index_of("WTREV");
    DataMatrix m(3, schema.dimension(), Space::Raw);
    for (long i = 0; i < 3; ++i)
        for (int j = 0; j < schema.dimension(); ++j)
            m.values(i, j) = schema.variables[j].min;
    m.values(0, age) = 75.0;     // above 60
    m.values(1, wt) = 0.638;     // exactly the lower bound, inclusive
    auto [screened, report] = screen_outliers(m, schema);
    CHECK(screened.rows() == 3);
    CHECK_FALSE(screened.mask(0, age));
    CHECK(screened.mask(1, wt));
    CHECK(report.flips_per_column[age] == 1);
    CHECK(report.total() == 1);

    auto [again, report2] = screen_outliers(screened, schema);
    CHECK(report2.total() == 0); // idempotent once screened
}

TEST_CASE("partition sizes follow floor arithmetic with remainder to training") {
    auto schema = reference_schema();

    SUBCASE("1000 complete rows split 600/150/250") {
        auto data = synthesize(schema, 1000, 3);
        auto parts = partition(data, {}, 17);
        CHECK(parts.train.rows() == 600);
        CHECK(parts.validation.rows() == 150);
        CHECK(parts.test.rows() == 250);
        CHECK(parts.impute_pool.rows() == 0);
    }

    SUBCASE("7 rows split 5/1/1") {
        auto data = synthesize(schema, 7, 3);
        auto parts = partition(data, {}, 17);
        CHECK(parts.train.rows() == 5);
        CHECK(parts.validation.rows() == 1);
        CHECK(parts.test.rows() == 1);
    }
}

TEST_CASE("partition is deterministic and covers the eligible set exactly") {
    auto schema = reference_schema();
    auto data = synthesize(schema, 97, 5);
    data.mask(10, 4) = false; // one incomplete row
    auto a = partition(data, {}, 99);
    auto b = partition(data, {}, 99);
    CHECK(a.train.values == b.train.values);
    CHECK(a.validation.values == b.validation.values);
    CHECK(a.test.values == b.test.values);

    CHECK(a.impute_pool.rows() == 1);
    CHECK(a.impute_pool.values(0, 0) == data.values(10, 0));
    CHECK_FALSE(a.impute_pool.mask(0, 4));

    // disjoint union of the complete rows, as multisets of row signatures
    auto signature = [](const DataMatrix& m, long i) {
        std::string s;
        for (int j = 0; j < m.cols(); ++j)
            s += std::to_string(m.values(i, j)) + "|";
        return s;
    };
    std::multiset<std::string> all, parts;
    for (long i = 0; i < data.rows(); ++i)
        if (i != 10) all.insert(signature(data, i));
    for (const auto* p : {&a.train, &a.validation, &a.test})
        for (long i = 0; i < p->rows(); ++i) parts.insert(signature(*p, i));
    CHECK(all == parts);
}

TEST_CASE("partition with no complete rows fails") {
    auto schema = reference_schema();
    auto data = synthesize(schema, 5, 1);
    for (long i = 0; i < data.rows(); ++i) data.mask(i, 0) = false;
    CHECK_THROWS_AS(partition(data, {}, 1), DataError);
}

TEST_CASE("ampute removes exactly the requested count per row") {
    auto schema = reference_schema();
    auto data = synthesize(schema, 1000, 11);
    std::vector<std::string> targets = {"HIV Status", "Age Group"};
    auto result = ampute(data, schema, targets, 1, 77);

    int hiv = schema.index_of("HIV Status");
    int age = schema.index_of("Age Group");
    long masked = 0, hiv_count = 0;
    for (long i = 0; i < data.rows(); ++i)
        for (int j = 0; j < data.cols(); ++j)
            if (!result.amputed.mask(i, j)) {
                ++masked;
                CHECK((j == hiv || j == age));
                if (j == hiv) ++hiv_count;
                // ground truth keeps the original value at the hole
                CHECK(result.ground_truth.values(i, j) == data.values(i, j));
                CHECK(result.ground_truth.mask(i, j));
            }
    CHECK(masked == 1000);
    CHECK(hiv_count > 430); // near-even split between the two targets
    CHECK(hiv_count < 570);
}

TEST_CASE("ampute with zero per-row count is a no-op") {
    auto schema = reference_schema();
    auto data = synthesize(schema, 10, 2);
    auto result = ampute(data, schema, {"Parity"}, 0, 1);
    CHECK(result.amputed.values == data.values);
    CHECK(result.amputed.missing_count() == 0);
}

TEST_CASE("ampute rejects a count larger than the target list") {
    auto schema = reference_schema();
    auto data = synthesize(schema, 10, 2);
    CHECK_THROWS_AS(ampute(data, schema, {"Parity"}, 2, 1), ConfigError);
}

TEST_CASE("synthesize obeys the schema and its dependency structure") {
    auto schema = reference_schema();
    auto data = synthesize(schema, 500, 31);
    CHECK(data.rows() == 500);
    CHECK(data.fully_observed());

    int grav = schema.index_of("Gravidity");
    int par = schema.index_of("Parity");
    int hiv = schema.index_of("HIV Status");
    for (long i = 0; i < data.rows(); ++i) {
        CHECK(data.values(i, par) <= data.values(i, grav));
        double h = data.values(i, hiv);
        CHECK((h == 0.0 || h == 1.0));
    }

    auto [screened, report] = screen_outliers(data, schema);
    CHECK(report.total() == 0);

    auto again = synthesize(schema, 500, 31);
    CHECK(again.values == data.values);
    auto other = synthesize(schema, 500, 32);
    CHECK(other.values != data.values);
}
