#pragma once

#include "hfc/hierarchy.hpp"
#include "hfc/panel.hpp"

#include <random>
#include <string>
#include <vector>

namespace fixtures {

/// Total -> R1, R2 -> six DCs each.
inline std::vector<hfc::Edge> fig1_edges() {
    std::vector<hfc::Edge> e{{"Total", "R1"}, {"Total", "R2"}};
    for (const char* r : {"R1", "R2"}) {
        for (int j = 1; j <= 6; ++j) e.emplace_back(r, std::string(r) + "_DC0" + std::to_string(j));
    }
    return e;
}

inline hfc::Hierarchy three_node() { return hfc::build_hierarchy({{"T", "A"}, {"T", "B"}}); }

inline hfc::Hierarchy seven_node() {
    return hfc::build_hierarchy({{"T", "A"}, {"T", "B"}, {"A", "A1"}, {"A", "A2"}, {"B", "B1"}, {"B", "B2"}});
}

inline hfc::Hierarchy fifteen_node() { return hfc::build_hierarchy(fig1_edges()); }

inline hfc::Matrix random_spd(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    hfc::Matrix a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    return a * a.transpose() + 0.1 * hfc::Matrix::Identity(n, n);
}

inline hfc::Matrix random_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> g(0.0, sd);
    hfc::Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    return a;
}

/// Positive random bottom sales and prices aggregated into a coherent panel.
inline hfc::SeriesPanel random_panel(const hfc::Hierarchy& h, Eigen::Index weeks, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> sales(5.0, 50.0), price(2.0, 5.0);
    const auto k = static_cast<Eigen::Index>(h.bottom_count());
    hfc::Matrix s(k, weeks), p(k, weeks);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        s.data()[i] = sales(rng);
        p.data()[i] = price(rng);
    }
    return hfc::panel_from_bottom(h, s, p);
}

inline std::string temp_dir(const std::string& name);

}  // namespace fixtures

#include <filesystem>

inline std::string fixtures::temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hfc_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}
