#pragma once

#include <cmath>
#include <complex>
#include <json.hpp>
#include <random>

#include "oblique/io.hpp"

namespace testing {

inline const nlohmann::json& oracle() {
    static const nlohmann::json j = nlohmann::json::parse(oblique::read_file(ORACLE_FIXTURE));
    return j;
}

inline std::complex<double> cplx(const nlohmann::json& a) { return {a[0].get<double>(), a[1].get<double>()}; }

inline double rel(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::abs(b); }
inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611);
    return g;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

}  // namespace testing
