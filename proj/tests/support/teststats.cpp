#include "support/teststats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctilm/stats.hpp"

namespace ctilm::testing {

double ks_test_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const double f = cdf(sample[k]);
        d = std::max(d, std::abs(f - static_cast<double>(k) / n));
        d = std::max(d, std::abs(static_cast<double>(k + 1) / n - f));
    }
    const double sn = std::sqrt(n);
    return ctilm::kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

double ks2_test_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const double t = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= t) ++ia;
        while (ib < b.size() && b[ib] <= t) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return ctilm::kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t j = k;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[k]]) ++j;
        const double mid = 0.5 * (static_cast<double>(k) + static_cast<double>(j)) + 1.0;
        for (std::size_t t = k; t <= j; ++t) r[order[t]] = mid;
        k = j + 1;
    }
    return r;
}

} // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        mx += rx[k];
        my += ry[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        sxy += (rx[k] - mx) * (ry[k] - my);
        sxx += (rx[k] - mx) * (rx[k] - mx);
        syy += (ry[k] - my) * (ry[k] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

double tv_distance_to_density(const std::vector<double>& sample,
                              const std::function<double(double)>& log_density, double lo,
                              double hi, int bins) {
    const double width = (hi - lo) / bins;
    // bin probabilities by midpoint quadrature on a fine sub-grid
    std::vector<double> logp(static_cast<std::size_t>(bins), -1e300);
    const int sub = 32;
    std::vector<double> values;
    for (int b = 0; b < bins; ++b) {
        double acc = 0.0;
        double max_log = -1e300;
        std::vector<double> logs(sub);
        for (int s = 0; s < sub; ++s) {
            const double x = lo + (b + (s + 0.5) / sub) * width;
            logs[static_cast<std::size_t>(s)] = log_density(x);
            max_log = std::max(max_log, logs[static_cast<std::size_t>(s)]);
        }
        if (max_log > -1e299) {
            for (double l : logs) acc += std::exp(l - max_log);
            logp[static_cast<std::size_t>(b)] = max_log + std::log(acc * width / sub);
        }
    }
    double max_all = -1e300;
    for (double l : logp) max_all = std::max(max_all, l);
    double total = 0.0;
    std::vector<double> prob(static_cast<std::size_t>(bins), 0.0);
    for (int b = 0; b < bins; ++b) {
        prob[static_cast<std::size_t>(b)] = std::exp(logp[static_cast<std::size_t>(b)] - max_all);
        total += prob[static_cast<std::size_t>(b)];
    }
    for (double& p : prob) p /= total;

    std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
    double inside = 0.0;
    for (double x : sample) {
        if (x < lo || x >= hi) continue;
        const int b = static_cast<int>((x - lo) / width);
        hist[static_cast<std::size_t>(std::min(b, bins - 1))] += 1.0;
        inside += 1.0;
    }
    for (double& h : hist) h /= inside;

    double tv = 0.0;
    for (int b = 0; b < bins; ++b)
        tv += std::abs(hist[static_cast<std::size_t>(b)] - prob[static_cast<std::size_t>(b)]);
    return 0.5 * tv;
}

} // namespace ctilm::testing
