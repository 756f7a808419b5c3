#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctilm/matrix.hpp"
#include "ctilm/rng.hpp"

namespace ctilm {

struct Locations {
    std::vector<double> x, y;
    std::size_t size() const { return x.size(); }
    void validate() const; // n >= 2, finite coordinates
};

Locations read_locations(const std::string& path); // CSV with header x,y
void write_locations(const std::string& path, const Locations& loc);

// d_ij = sqrt((x_i-x_j)^2 + (y_i-y_j)^2); symmetric with zero diagonal
Matrix euclidean_distances(const Locations& loc);

enum class NetworkModel { PowerLaw, Cauchy, Random };
NetworkModel network_model_from_name(const std::string& name);

enum class NetworkKind { BinaryUndirected, BinaryDirected, WeightedUndirected, WeightedDirected };
const char* network_kind_name(NetworkKind k);

struct ContactNetwork {
    Matrix weights; // n x n, zero diagonal, nonnegative
    NetworkKind kind = NetworkKind::BinaryUndirected;

    void validate() const;
};

// Connection probability of the spatial models at distance d; Random ignores
// d and returns beta. PowerLaw: 1 - exp(-nu d^-beta); Cauchy: 1 - exp(-beta/(d^2+beta^2)).
double connection_probability(NetworkModel model, double beta, double nu, double d);

// Samples each of the C(n,2) unordered pairs once, row-major over i < j, so a
// seed reproduces the same network everywhere. PowerLaw and Cauchy need
// locations; Random needs n and beta in (0, 1].
ContactNetwork generate_network(NetworkModel model, const Locations* loc, std::size_t n,
                                double beta, double nu, Rng& rng);

// Edge-list CSV (header from,to,weight; 1-based ids). Undirected networks are
// written as i < j rows and symmetrized on import; files containing a
// from > to row import as directed.
void export_edge_list(const ContactNetwork& net, std::ostream& out);
void write_edge_list(const std::string& path, const ContactNetwork& net);
ContactNetwork import_edge_list(std::istream& in, std::size_t n);
ContactNetwork read_edge_list(const std::string& path, std::size_t n);

NetworkKind classify_network(const Matrix& weights);

} // namespace ctilm
