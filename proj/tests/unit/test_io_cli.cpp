#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "ctilm/config.hpp"
#include "ctilm/csvio.hpp"
#include "ctilm/errors.hpp"
#include "support/builders.hpp"

using namespace ctilm;
using namespace ctilm::testing;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("io_cli");

TEST_CASE("numeric serialization round trips") {
    Rng rng(99);
    for (int k = 0; k < 2000; ++k) {
        const double v = std::exp(rng.uniform(-40.0, 40.0)) * (rng.bernoulli(0.5) ? 1 : -1);
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(kInfinity) == "Inf");
    CHECK(format_double(-kInfinity) == "-Inf");
    CHECK(parse_double("Inf") == kInfinity);
    CHECK(parse_double("NA") == kInfinity);
    CHECK_THROWS_AS(parse_double("abc"), Error);
    CHECK_THROWS_AS(parse_double(""), Error);
}

TEST_CASE("event history CSV: write -> read -> write is byte-identical") {
    Rng rng(5);
    for (Framework fw : {Framework::SIR, Framework::SINR}) {
        const EventHistory h = random_history(fw, 6, 4, rng);
        const std::string once = event_history_to_csv(h);
        const EventHistory back = event_history_from_csv_text(once);
        CHECK(event_history_to_csv(back) == once);
        CHECK(back.infected_count() == h.infected_count());
        CHECK(back.t_obs() == h.t_obs());
    }
}

TEST_CASE("event history CSV headers match the documented layout") {
    const EventHistory h = build_event_history(Framework::SIR, {1, 2}, {0.0, kInfinity}, {1.0, kInfinity});
    const std::string text = event_history_to_csv(h);
    CHECK(text.rfind("id,rem.time,inf.period,inf.time\n", 0) == 0);
    CHECK(text.find("2,Inf,0,Inf") != std::string::npos);
}

TEST_CASE("config schema: unknown keys and bad values are rejected up front") {
    const std::string dir = make_temp_dir("config");
    auto write_config = [&](const std::string& body) {
        const std::string path = dir + "/config.json";
        write_text_file(path, body);
        return path;
    };

    CHECK_THROWS_AS(Study::load(write_config("{ not json")), Error);
    CHECK_THROWS_AS(Study::load(write_config(R"({"framework":"SIR","kernel":"network-binary",
        "population":3,"typo_key":1})")),
                    Error);
    CHECK_THROWS_AS(Study::load(write_config(R"({"framework":"SEIR","kernel":"network-binary",
        "population":3})")),
                    Error);
    // schema errors fire before file loading: the bogus path is never touched
    CHECK_THROWS_AS(Study::load(write_config(R"({"framework":"SIR","kernel":"network-binary",
        "files":{"network":"/nonexistent/net.csv","bogus":"x"},"population":3})")),
                    Error);
    try {
        Study::load(write_config(R"({"framework":"SIR","kernel":"network-binary",
            "files":{"network":"/nonexistent/net.csv","bogus":"x"},"population":3})"));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidConfig); // not Io
    }
}

TEST_CASE("CLI: net-gen / simulate / loglik self-consistency and determinism") {
    const std::string dir = make_temp_dir("cli");

    // locations for 12 individuals
    Rng rng(7);
    Locations loc;
    for (int i = 0; i < 12; ++i) {
        loc.x.push_back(rng.uniform(0.0, 8.0));
        loc.y.push_back(rng.uniform(0.0, 8.0));
    }
    write_locations(dir + "/loc.csv", loc);

    REQUIRE(run_cli("net-gen --model powerlaw --locations " + dir + "/loc.csv --beta 1.5 --nu 1" +
                    " --seed 5 --out " + dir + "/net.csv") == 0);
    REQUIRE(run_cli("net-gen --model powerlaw --locations " + dir + "/loc.csv --beta 1.5 --nu 1" +
                    " --seed 5 --out " + dir + "/net2.csv") == 0);
    CHECK(read_text_file(dir + "/net.csv") == read_text_file(dir + "/net2.csv"));

    write_text_file(dir + "/config.json", R"({
      "framework": "SIR",
      "kernel": "network-binary",
      "files": {"network": "net.csv", "locations": "loc.csv", "events": "epi.csv"},
      "parameters": {"sus_coeffs": [0.4]},
      "periods": {"infectious": {"shape": 4, "rate": 2}},
      "seed": 31,
      "output": "out"
    })");
    // config.json references epi.csv, so simulate first with a config that
    // does not list an events file
    write_text_file(dir + "/sim_config.json", R"({
      "framework": "SIR",
      "kernel": "network-binary",
      "files": {"network": "net.csv", "locations": "loc.csv"},
      "parameters": {"sus_coeffs": [0.4]},
      "periods": {"infectious": {"shape": 4, "rate": 2}},
      "seed": 31
    })");
    REQUIRE(run_cli("simulate --config " + dir + "/sim_config.json --out " + dir + "/epi.csv") == 0);
    REQUIRE(run_cli("simulate --config " + dir + "/sim_config.json --out " + dir + "/epi2.csv") == 0);
    CHECK(read_text_file(dir + "/epi.csv") == read_text_file(dir + "/epi2.csv"));

    // loglik of the simulated epidemic at the generating parameters is finite
    REQUIRE(run_cli("loglik --config " + dir + "/config.json > " + dir + "/ll.txt") == 0);
    const double ll = parse_double([&] {
        std::string text = read_text_file(dir + "/ll.txt");
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        return text;
    }());
    CHECK(std::isfinite(ll));

    // missing required file: validation exit code 1
    write_text_file(dir + "/bad.json", R"({
      "framework": "SIR",
      "kernel": "network-binary",
      "files": {"network": "missing.csv"},
      "population": 12
    })");
    CHECK(run_cli("loglik --config " + dir + "/bad.json 2> /dev/null") == 1);
}

TEST_CASE("CLI: summarize of a constant synthetic draw file has zero SD") {
    const std::string dir = make_temp_dir("summ");
    std::ofstream out(dir + "/chain1.csv");
    out << "iter,Alpha_s[1],Log-likelihood\n";
    for (int k = 0; k <= 50; ++k) out << k << ",0.25,-10\n";
    out.close();

    REQUIRE(run_cli("summarize --draws " + dir + " --start 0 --thin 1 --out " + dir + "/summary.csv") == 0);
    const CsvTable t = [&] {
        // name column is non-numeric: parse manually
        CsvTable raw;
        std::ifstream in(dir + "/summary.csv");
        std::string line;
        std::getline(in, line);
        raw.header = split_csv_line(line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            std::vector<double> row;
            for (std::size_t k = 1; k < f.size() - 1; ++k) row.push_back(parse_double(f[k]));
            raw.rows.push_back(row);
        }
        return raw;
    }();
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == doctest::Approx(0.25)); // mean
    CHECK(t.rows[0][1] == 0.0);                   // sd
}

TEST_SUITE_END();
