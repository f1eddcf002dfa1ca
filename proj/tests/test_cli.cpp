#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kBin = GAFILL_BIN;

// Runs the binary, returns its exit status; stdout/stderr land in the
// given file so assertions can inspect them.
int run(const std::string& args, const std::string& log = "/dev/null") {
    std::string cmd = kBin + " " + args + " >" + log + " 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

bool same_bytes(const std::string& a, const std::string& b) {
    return slurp(a) == slurp(b);
}

// Shared tiny pipeline, built once: a small corpus prepared and a small
// network trained on it, enough for the command-level checks.
struct Workspace {
    fs::path root;
    std::string csv;
    std::string prepared;
    std::string model_dir;
    std::string backend;

    Workspace() {
        root = fs::path("/tmp") / ("gafill_cli_" + std::to_string(::getpid()));
        fs::remove_all(root);
        fs::create_directories(root);
        csv = (root / "data.csv").string();
        prepared = (root / "prepared").string();
        model_dir = (root / "model").string();
        backend = model_dir + "/backend.bin";

        REQUIRE(run("synth --n 300 " + csv + " --seed 5") == 0);
        REQUIRE(run("prepare " + csv + " --out-dir " + prepared + " --seed 5") == 0);
        REQUIRE(run("train " + prepared + " --out-dir " + model_dir +
                    " --seed 5 --cycles 15 --hidden 4") == 0);
    }
};

Workspace& workspace() {
    static Workspace w;
    return w;
}

} // namespace

TEST_CASE("pipeline commands succeed and leave their artifacts") {
    auto& w = workspace();
    for (const char* name :
         {"train.bin", "validation.bin", "test.bin", "impute_pool.bin",
          "schema.json", "prepare_report.json", "effective_config.json"})
        CHECK(fs::exists(fs::path(w.prepared) / name));
    CHECK(fs::exists(w.backend));
    CHECK(fs::exists(fs::path(w.model_dir) / "training_report.json"));

    auto eval_dir = (w.root / "eval").string();
    auto log = (w.root / "eval.log").string();
    CHECK(run("evaluate " + w.backend + " " + w.prepared + " --out-dir " +
              eval_dir + " --seed 5 --runs 1 --records-per-run 8" +
              " --population 8 --generations 4",
              log) == 0);
    CHECK(fs::exists(fs::path(eval_dir) / "report.txt"));
    CHECK(fs::exists(fs::path(eval_dir) / "report.jsonl"));
    auto table = slurp(log);
    CHECK(table.find("HIV Status") != std::string::npos);
    CHECK(table.find("Accuracy") != std::string::npos);
}

TEST_CASE("imputation fills holes and reports what it did") {
    auto& w = workspace();
    // knock two cells out of the synthetic corpus
    auto holes = (w.root / "holes.csv").string();
    {
        std::istringstream in(slurp(w.csv));
        std::ofstream out(holes);
        std::string line;
        long row = 0;
        while (std::getline(in, line)) {
            if (row == 2 || row == 5) {
                auto comma = line.find(',');
                line = line.substr(comma); // first field becomes empty
            }
            out << line << "\n";
            ++row;
        }
    }
    auto filled = (w.root / "filled.csv").string();
    auto out_dir = (w.root / "impute_out").string();
    CHECK(run("impute " + w.backend + " " + holes + " " + filled + " --out-dir " +
              out_dir + " --seed 9 --population 8 --generations 4") == 0);

    // completed file has no empty cells left and same row count
    auto text = slurp(filled);
    CHECK(text.find(",,") == std::string::npos);
    CHECK(text.find(",\n") == std::string::npos);
    CHECK(text.front() != ',');
    long rows = std::count(text.begin(), text.end(), '\n');
    auto original = slurp(w.csv);
    long rows_in = std::count(original.begin(), original.end(), '\n');
    CHECK(rows == rows_in);
    CHECK(fs::exists(fs::path(out_dir) / "impute_diagnostics.jsonl"));
}

TEST_CASE("imputing a complete file is a byte copy with the informational code") {
    auto& w = workspace();
    auto copied = (w.root / "copied.csv").string();
    int code = run("impute " + w.backend + " " + w.csv + " " + copied +
                   " --out-dir " + (w.root / "noop").string());
    CHECK(code == 10);
    CHECK(same_bytes(w.csv, copied));
}

TEST_CASE("verbose imputation writes a search trace") {
    auto& w = workspace();
    auto holes = (w.root / "one_hole.csv").string();
    {
        std::istringstream in(slurp(w.csv));
        std::ofstream out(holes);
        std::string line;
        long row = 0;
        while (std::getline(in, line)) {
            if (row == 3) {
                auto comma = line.find(',');
                line = line.substr(comma);
            }
            out << line << "\n";
            ++row;
        }
    }
    auto filled = (w.root / "traced.csv").string();
    auto out_dir = (w.root / "trace_out").string();
    CHECK(run("impute " + w.backend + " " + holes + " " + filled + " --out-dir " +
              out_dir + " --seed 9 --population 8 --generations 4 --verbose") == 0);
    CHECK(fs::exists(fs::path(out_dir) / "ga_trace.jsonl"));
    // one line per generation plus the initial state
    auto trace = slurp(fs::path(out_dir) / "ga_trace.jsonl");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 5);
}

TEST_CASE("configuration problems exit with code 2") {
    auto& w = workspace();
    CHECK(run("synth --n 10") == 2);                        // missing output arg
    CHECK(run("prepare " + w.csv + " --no-such-flag") == 2);
    CHECK(run("frobnicate") == 2);                          // unknown subcommand
    CHECK(run("") == 2);                                    // no subcommand

    auto bad_config = (w.root / "bad.json").string();
    std::ofstream(bad_config) << R"({"max_cycle": 10})";
    auto log = (w.root / "badcfg.log").string();
    CHECK(run("prepare " + w.csv + " --config " + bad_config, log) == 2);
    CHECK(slurp(log).find("max_cycle") != std::string::npos);

    std::ofstream(bad_config) << R"({"variant": "MEANFILL"})";
    CHECK(run("train " + w.prepared + " --config " + bad_config) == 2);

    CHECK(run("prepare " + w.csv + " --config /tmp/gafill_absent.json") == 2);
}

TEST_CASE("data problems exit with code 3 and name the trouble") {
    auto& w = workspace();

    SUBCASE("wrong CSV header") {
        auto renamed = (w.root / "renamed.csv").string();
        auto text = slurp(w.csv);
        auto pos = text.find("Education");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 9, "Schooling");
        std::ofstream(renamed) << text;
        auto log = (w.root / "header.log").string();
        CHECK(run("prepare " + renamed + " --out-dir " +
                  (w.root / "p_renamed").string(), log) == 3);
        CHECK(slurp(log).find("Education") != std::string::npos);
    }

    SUBCASE("missing input file") {
        CHECK(run("prepare /tmp/gafill_absent.csv --out-dir " +
                  (w.root / "p_absent").string()) == 3);
    }

    SUBCASE("corrupt backend file") {
        auto mangled = (w.root / "mangled.bin").string();
        auto bytes = slurp(w.backend);
        bytes[bytes.size() / 2] ^= 0x20;
        std::ofstream(mangled, std::ios::binary) << bytes;
        CHECK(run("evaluate " + mangled + " " + w.prepared + " --out-dir " +
                  (w.root / "e_mangled").string()) == 3);
    }

    SUBCASE("model paired with a different preparation run") {
        auto other = (w.root / "prepared_other").string();
        REQUIRE(run("prepare " + w.csv + " --out-dir " + other + " --seed 6") == 0);
        auto log = (w.root / "stale.log").string();
        CHECK(run("evaluate " + w.backend + " " + other + " --out-dir " +
                  (w.root / "e_stale").string() + " --runs 1" +
                  " --records-per-run 5 --population 8 --generations 4",
                  log) == 3);
        CHECK(slurp(log).find("hash") != std::string::npos);
    }
}

TEST_CASE("preparation reruns are byte-identical") {
    auto& w = workspace();
    auto again = (w.root / "prepared_again").string();
    REQUIRE(run("prepare " + w.csv + " --out-dir " + again + " --seed 5") == 0);
    for (const char* name : {"train.bin", "validation.bin", "test.bin",
                             "impute_pool.bin", "schema.json"})
        CHECK(same_bytes((fs::path(w.prepared) / name).string(),
                         (fs::path(again) / name).string()));
}

TEST_CASE("synthesis is deterministic in the seed") {
    auto& w = workspace();
    auto a = (w.root / "synth_a.csv").string();
    auto b = (w.root / "synth_b.csv").string();
    auto c = (w.root / "synth_c.csv").string();
    REQUIRE(run("synth --n 50 " + a + " --seed 77") == 0);
    REQUIRE(run("synth --n 50 " + b + " --seed 77") == 0);
    REQUIRE(run("synth --n 50 " + c + " --seed 78") == 0);
    CHECK(same_bytes(a, b));
    CHECK_FALSE(same_bytes(a, c));
}

TEST_CASE("help text documents the exit codes") {
    auto& w = workspace();
    auto log = (w.root / "help.log").string();
    CHECK(run("--help", log) == 0);
    auto help = slurp(log);
    for (const char* needle : {"prepare", "train", "impute", "evaluate", "synth",
                               "Exit codes", "10"})
        CHECK(help.find(needle) != std::string::npos);
}
