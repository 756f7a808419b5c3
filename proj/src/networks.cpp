#include "ctilm/networks.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ctilm/csvio.hpp"
#include "ctilm/errors.hpp"

namespace ctilm {

void Locations::validate() const {
    if (x.size() != y.size())
        throw Error(ErrorCode::InconsistentDimensions, "location coordinate vectors differ in length");
    if (x.size() < 2) throw Error(ErrorCode::MissingLocations, "need at least two locations");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw Error(ErrorCode::InconsistentDimensions, "non-finite coordinate");
}

Locations read_locations(const std::string& path) {
    CsvTable t = read_csv(path, true);
    if (t.header.size() != 2 || t.header[0] != "x" || t.header[1] != "y")
        throw Error(ErrorCode::Io, "locations file must have header x,y");
    Locations loc;
    for (const auto& row : t.rows) {
        loc.x.push_back(row[0]);
        loc.y.push_back(row[1]);
    }
    loc.validate();
    return loc;
}

void write_locations(const std::string& path, const Locations& loc) {
    std::vector<std::vector<double>> rows;
    rows.reserve(loc.size());
    for (std::size_t i = 0; i < loc.size(); ++i) rows.push_back({loc.x[i], loc.y[i]});
    write_csv(path, {"x", "y"}, rows);
}

Matrix euclidean_distances(const Locations& loc) {
    loc.validate();
    const std::size_t n = loc.size();
    Matrix d(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = loc.x[i] - loc.x[j];
            const double dy = loc.y[i] - loc.y[j];
            const double dist = std::sqrt(dx * dx + dy * dy);
            d(i, j) = dist;
            d(j, i) = dist;
        }
    return d;
}

NetworkModel network_model_from_name(const std::string& name) {
    if (name == "powerlaw") return NetworkModel::PowerLaw;
    if (name == "cauchy") return NetworkModel::Cauchy;
    if (name == "random") return NetworkModel::Random;
    throw Error(ErrorCode::InvalidConfig, "unknown network model '" + name + "'");
}

const char* network_kind_name(NetworkKind k) {
    switch (k) {
        case NetworkKind::BinaryUndirected: return "binary-undirected";
        case NetworkKind::BinaryDirected: return "binary-directed";
        case NetworkKind::WeightedUndirected: return "weighted-undirected";
        case NetworkKind::WeightedDirected: return "weighted-directed";
    }
    return "?";
}

void ContactNetwork::validate() const {
    if (!weights.square()) throw Error(ErrorCode::InconsistentDimensions, "contact network must be square");
    if (!weights.zero_diagonal())
        throw Error(ErrorCode::InconsistentDimensions, "contact network must have a zero diagonal");
    if (!weights.nonnegative())
        throw Error(ErrorCode::InconsistentDimensions, "contact network weights must be nonnegative");
    const bool undirected =
        kind == NetworkKind::BinaryUndirected || kind == NetworkKind::WeightedUndirected;
    const bool binary = kind == NetworkKind::BinaryUndirected || kind == NetworkKind::BinaryDirected;
    if (undirected && !weights.symmetric())
        throw Error(ErrorCode::InconsistentDimensions, "undirected contact network must be symmetric");
    if (binary && !weights.binary())
        throw Error(ErrorCode::InconsistentDimensions, "binary contact network must contain only 0/1");
}

double connection_probability(NetworkModel model, double beta, double nu, double d) {
    switch (model) {
        case NetworkModel::PowerLaw: return 1.0 - std::exp(-nu * std::pow(d, -beta));
        case NetworkModel::Cauchy: return 1.0 - std::exp(-beta / (d * d + beta * beta));
        case NetworkModel::Random: return beta;
    }
    return 0.0;
}

ContactNetwork generate_network(NetworkModel model, const Locations* loc, std::size_t n,
                                double beta, double nu, Rng& rng) {
    if (!(beta > 0.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must be positive");
    Matrix distances;
    if (model == NetworkModel::Random) {
        if (beta > 1.0)
            throw Error(ErrorCode::BetaOutOfRange, "random-model beta is a Bernoulli probability in (0,1]");
        if (n < 2) throw Error(ErrorCode::InconsistentDimensions, "need n >= 2");
    } else {
        if (!loc) throw Error(ErrorCode::MissingLocations,
                              "spatial network models require XY coordinates");
        loc->validate();
        n = loc->size();
        distances = euclidean_distances(*loc);
        if (model == NetworkModel::PowerLaw && !(nu > 0.0))
            throw Error(ErrorCode::BetaOutOfRange, "power-law scale nu must be positive");
    }

    ContactNetwork net;
    net.kind = NetworkKind::BinaryUndirected;
    net.weights = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distances.empty() ? 0.0 : distances(i, j);
            const double p = connection_probability(model, beta, nu, d);
            if (rng.bernoulli(p)) {
                net.weights(i, j) = 1.0;
                net.weights(j, i) = 1.0;
            }
        }
    return net;
}

void export_edge_list(const ContactNetwork& net, std::ostream& out) {
    out << "from,to,weight\n";
    const std::size_t n = net.weights.rows();
    const bool undirected =
        net.kind == NetworkKind::BinaryUndirected || net.kind == NetworkKind::WeightedUndirected;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = undirected ? i + 1 : 0;
        for (std::size_t j = j0; j < n; ++j) {
            if (i == j) continue;
            const double w = net.weights(i, j);
            if (w != 0.0)
                out << (i + 1) << ',' << (j + 1) << ',' << format_double(w) << '\n';
        }
    }
}

void write_edge_list(const std::string& path, const ContactNetwork& net) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    export_edge_list(net, out);
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

ContactNetwork import_edge_list(std::istream& in, std::size_t n) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Io, "empty edge-list file");
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != "from,to,weight")
        throw Error(ErrorCode::Io, "edge list must start with header from,to,weight");

    ContactNetwork net;
    net.weights = Matrix(n, n, 0.0);
    bool directed = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) throw Error(ErrorCode::Io, "edge-list row must have three fields");
        const long from = static_cast<long>(parse_double(fields[0]));
        const long to = static_cast<long>(parse_double(fields[1]));
        const double w = parse_double(fields[2]);
        if (from < 1 || to < 1 || from > static_cast<long>(n) || to > static_cast<long>(n))
            throw Error(ErrorCode::InconsistentDimensions, "edge endpoint outside 1..n");
        if (from == to) throw Error(ErrorCode::InconsistentDimensions, "self-loops are not allowed");
        if (from > to) directed = true;
        net.weights(from - 1, to - 1) = w;
    }
    if (!directed) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) net.weights(j, i) = net.weights(i, j);
    }
    net.kind = classify_network(net.weights);
    net.validate();
    return net;
}

ContactNetwork read_edge_list(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    return import_edge_list(in, n);
}

NetworkKind classify_network(const Matrix& weights) {
    const bool sym = weights.symmetric();
    const bool bin = weights.binary();
    if (sym) return bin ? NetworkKind::BinaryUndirected : NetworkKind::WeightedUndirected;
    return bin ? NetworkKind::BinaryDirected : NetworkKind::WeightedDirected;
}

} // namespace ctilm
