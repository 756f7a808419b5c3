#include <cmath>
#include <sstream>

#include <doctest.h>

#include "ctilm/errors.hpp"
#include "ctilm/networks.hpp"

using namespace ctilm;

TEST_SUITE_BEGIN("networks");

TEST_CASE("euclidean distances") {
    Locations loc;
    loc.x = {0.0, 3.0, 1.0, 4.0};
    loc.y = {0.0, 4.0, 1.0, 5.0};
    const Matrix d = euclidean_distances(loc);
    CHECK(d(0, 1) == doctest::Approx(5.0)); // 3-4-5 triangle
    CHECK(d(2, 3) == doctest::Approx(5.0));
    CHECK(d(1, 0) == d(0, 1));
    for (std::size_t i = 0; i < 4; ++i) CHECK(d(i, i) == 0.0);

    Locations same;
    same.x = {2.0, 2.0};
    same.y = {1.0, 1.0};
    CHECK(euclidean_distances(same)(0, 1) == 0.0);
}

TEST_CASE("connection probabilities") {
    // 1 - exp(-0.5 * 1^-1.5)
    CHECK(connection_probability(NetworkModel::PowerLaw, 1.5, 0.5, 1.0) ==
          doctest::Approx(0.39346934028736658).epsilon(1e-12));
    // both spatial forms vanish at large distance
    CHECK(connection_probability(NetworkModel::PowerLaw, 1.5, 0.5, 1e9) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(connection_probability(NetworkModel::Cauchy, 0.5, 0.0, 1e9) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(connection_probability(NetworkModel::Random, 0.08, 0.0, 123.0) == 0.08);
}

TEST_CASE("generated networks are symmetric binary with zero diagonal") {
    Rng rng(5);
    Locations loc;
    for (int i = 0; i < 30; ++i) {
        loc.x.push_back(rng.uniform(0.0, 10.0));
        loc.y.push_back(rng.uniform(0.0, 10.0));
    }
    const ContactNetwork net = generate_network(NetworkModel::PowerLaw, &loc, 0, 1.8, 1.0, rng);
    CHECK(net.kind == NetworkKind::BinaryUndirected);
    CHECK(net.weights.symmetric());
    CHECK(net.weights.zero_diagonal());
    CHECK(net.weights.binary());
    net.validate();
}

TEST_CASE("same seed reproduces the same network bit for bit") {
    Locations loc;
    Rng setup(11);
    for (int i = 0; i < 20; ++i) {
        loc.x.push_back(setup.uniform(0.0, 10.0));
        loc.y.push_back(setup.uniform(0.0, 10.0));
    }
    Rng a(99), b(99);
    const ContactNetwork na = generate_network(NetworkModel::Cauchy, &loc, 0, 0.5, 0.0, a);
    const ContactNetwork nb = generate_network(NetworkModel::Cauchy, &loc, 0, 0.5, 0.0, b);
    CHECK(na.weights == nb.weights);
}

TEST_CASE("random model: empirical density and validation") {
    // paper example: beta = 0.08 on 50 individuals
    Rng rng(17);
    long edges = 0, pairs = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        const ContactNetwork net = generate_network(NetworkModel::Random, nullptr, 50, 0.08, 0.0, rng);
        for (std::size_t i = 0; i < 50; ++i)
            for (std::size_t j = i + 1; j < 50; ++j) {
                edges += net.weights(i, j) != 0.0;
                ++pairs;
            }
    }
    const double density = static_cast<double>(edges) / static_cast<double>(pairs);
    const double se = std::sqrt(0.08 * 0.92 / static_cast<double>(pairs));
    CHECK(std::abs(density - 0.08) < 3.0 * se);

    CHECK_THROWS_AS(generate_network(NetworkModel::Random, nullptr, 50, 1.3, 0.0, rng), Error);
    CHECK_THROWS_AS(generate_network(NetworkModel::Random, nullptr, 50, 0.0, 0.0, rng), Error);
    CHECK_THROWS_AS(generate_network(NetworkModel::PowerLaw, nullptr, 50, 1.0, 1.0, rng), Error);
}

TEST_CASE("expected degree matches the Bernoulli sums") {
    Rng setup(4);
    Locations loc;
    for (int i = 0; i < 12; ++i) {
        loc.x.push_back(setup.uniform(0.0, 4.0));
        loc.y.push_back(setup.uniform(0.0, 4.0));
    }
    const Matrix d = euclidean_distances(loc);
    const int node = 3;
    double expected = 0.0, var = 0.0;
    for (std::size_t j = 0; j < loc.size(); ++j) {
        if (static_cast<int>(j) == node) continue;
        const double p = connection_probability(NetworkModel::PowerLaw, 1.5, 0.5, d(node, j));
        expected += p;
        var += p * (1.0 - p);
    }
    const int reps = 2000;
    Rng rng(31);
    double total_degree = 0.0;
    for (int r = 0; r < reps; ++r) {
        const ContactNetwork net = generate_network(NetworkModel::PowerLaw, &loc, 0, 1.5, 0.5, rng);
        for (std::size_t j = 0; j < loc.size(); ++j) total_degree += net.weights(node, j);
    }
    const double mean_degree = total_degree / reps;
    const double se = std::sqrt(var / reps);
    CHECK(std::abs(mean_degree - expected) < 3.0 * se);
}

TEST_CASE("edge-list export and import round trip") {
    // empty network: header only
    ContactNetwork empty;
    empty.weights = Matrix(3, 3, 0.0);
    std::ostringstream out;
    export_edge_list(empty, out);
    CHECK(out.str() == "from,to,weight\n");

    // single edge
    ContactNetwork one;
    one.weights = Matrix(3, 3, 0.0);
    one.weights(0, 1) = one.weights(1, 0) = 1.0;
    std::ostringstream out1;
    export_edge_list(one, out1);
    CHECK(out1.str() == "from,to,weight\n1,2,1\n");

    // 3-cycle: three rows
    ContactNetwork cyc;
    cyc.weights = Matrix(3, 3, 0.0);
    for (auto [i, j] : {std::pair{0, 1}, {1, 2}, {0, 2}})
        cyc.weights(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
            cyc.weights(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = 1.0;
    std::ostringstream out3;
    export_edge_list(cyc, out3);
    int rows = 0;
    for (char c : out3.str()) rows += c == '\n';
    CHECK(rows == 4); // header + 3 edges

    std::istringstream in(out3.str());
    const ContactNetwork back = import_edge_list(in, 3);
    CHECK(back.weights == cyc.weights);

    // generated network round trip
    Rng rng(23);
    Locations loc;
    for (int i = 0; i < 15; ++i) {
        loc.x.push_back(rng.uniform(0.0, 6.0));
        loc.y.push_back(rng.uniform(0.0, 6.0));
    }
    const ContactNetwork net = generate_network(NetworkModel::PowerLaw, &loc, 0, 1.5, 0.7, rng);
    std::ostringstream outn;
    export_edge_list(net, outn);
    std::istringstream inn(outn.str());
    const ContactNetwork rt = import_edge_list(inn, 15);
    CHECK(rt.weights == net.weights);
    CHECK(rt.kind == net.kind);
}

TEST_SUITE_END();
