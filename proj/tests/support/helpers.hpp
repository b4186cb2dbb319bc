#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace testsup {

// Writes content to a fresh file under the system temp directory and returns
// its path; files are left for post-mortem inspection.
inline std::string write_temp_file(const std::string& stem, const std::string& content) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() / "tvme_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / (stem + "_" + std::to_string(counter++) + ".csv");
    std::ofstream out(path);
    out << content;
    out.close();
    return path.string();
}

inline std::filesystem::path fresh_out_dir(const std::string& stem) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() / "tvme_tests" /
                     (stem + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Plain AR(p) simulator local to the tests, independent of the library's lab.
inline std::vector<double> simulate_ar(std::span<const double> coeffs, double intercept,
                                       double sigma, int T, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, sigma);
    const int p = static_cast<int>(coeffs.size());
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(T) + 200);
    for (int t = 0; t < T + 200; ++t) {
        double v = intercept + nd(rng);
        for (int j = 0; j < p && j < t; ++j) {
            v += coeffs[static_cast<std::size_t>(j)] * x[x.size() - 1 - static_cast<std::size_t>(j)];
        }
        x.push_back(v);
    }
    return std::vector<double>(x.end() - T, x.end());
}

inline std::vector<double> simulate_random_walk(int T, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(T));
    double level = 0.0;
    for (int t = 0; t < T; ++t) {
        level += nd(rng);
        x[static_cast<std::size_t>(t)] = level;
    }
    return x;
}

}  // namespace testsup
