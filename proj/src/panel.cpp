#include "hfc/panel.hpp"

#include "hfc/io.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace hfc {

SeriesPanel SeriesPanel::slice(Eigen::Index first, Eigen::Index count) const {
    if (first < 0 || count < 0 || first + count > week_count()) {
        throw InvalidInput("panel slice [" + std::to_string(first) + ", " + std::to_string(first + count) +
                           ") out of range for " + std::to_string(week_count()) + " weeks");
    }
    SeriesPanel out;
    out.node_ids = node_ids;
    out.weeks.assign(weeks.begin() + first, weeks.begin() + first + count);
    out.sales = sales.middleCols(first, count);
    out.price = price.middleCols(first, count);
    return out;
}

void aggregate_prices(const Hierarchy& hierarchy, const Matrix& sales, Matrix& price) {
    // Bottom-up so each aggregate reads already-filled children.
    for (int level = hierarchy.bottom_level() - 1; level >= 0; --level) {
        for (auto i : hierarchy.level_nodes(level)) {
            const auto& kids = hierarchy.node(i).children;
            const auto row = static_cast<Eigen::Index>(i);
            for (Eigen::Index t = 0; t < sales.cols(); ++t) {
                double weight = 0.0, weighted = 0.0, plain = 0.0;
                for (auto c : kids) {
                    const auto cr = static_cast<Eigen::Index>(c);
                    weight += sales(cr, t);
                    weighted += sales(cr, t) * price(cr, t);
                    plain += price(cr, t);
                }
                price(row, t) = weight > 0.0 ? weighted / weight : plain / static_cast<double>(kids.size());
            }
        }
    }
}

SeriesPanel panel_from_bottom(const Hierarchy& hierarchy, const Matrix& bottom_sales, const Matrix& bottom_price,
                              std::vector<int> weeks) {
    const auto mk = static_cast<Eigen::Index>(hierarchy.bottom_count());
    if (bottom_sales.rows() != mk || bottom_price.rows() != mk || bottom_price.cols() != bottom_sales.cols()) {
        throw InvalidInput("panel_from_bottom: bottom blocks must be " + std::to_string(mk) + " x n");
    }
    if ((bottom_sales.array() < 0.0).any()) throw InvalidInput("panel_from_bottom: negative sales");
    if ((bottom_price.array() <= 0.0).any()) throw InvalidInput("panel_from_bottom: non-positive price");
    const auto n = bottom_sales.cols();
    if (weeks.empty()) {
        weeks.resize(static_cast<std::size_t>(n));
        std::iota(weeks.begin(), weeks.end(), 1);
    }
    if (static_cast<Eigen::Index>(weeks.size()) != n) throw InvalidInput("panel_from_bottom: week count mismatch");

    SeriesPanel panel;
    panel.node_ids = hierarchy.ids();
    panel.weeks = std::move(weeks);
    panel.sales = aggregate_panel(bottom_sales, summing_matrix(hierarchy));
    panel.price = Matrix::Zero(panel.sales.rows(), n);
    panel.price.bottomRows(mk) = bottom_price;
    aggregate_prices(hierarchy, panel.sales, panel.price);
    return panel;
}

double coherence_residual(const Hierarchy& hierarchy, const Matrix& values) {
    double worst = 0.0;
    for (std::size_t i = 0; i < hierarchy.size(); ++i) {
        const auto& kids = hierarchy.node(i).children;
        if (kids.empty()) continue;
        for (Eigen::Index t = 0; t < values.cols(); ++t) {
            double sum = 0.0;
            for (auto c : kids) sum += values(static_cast<Eigen::Index>(c), t);
            const double v = values(static_cast<Eigen::Index>(i), t);
            worst = std::max(worst, std::abs(v - sum) / std::max(1.0, std::abs(v)));
        }
    }
    return worst;
}

SeriesPanel read_panel_csv(const std::string& path, const Hierarchy& hierarchy) {
    auto table = read_csv(path, {"week", "node_id", "sales", "price"});
    std::map<long long, Eigen::Index> week_col;
    for (const auto& row : table.rows) week_col.emplace(parse_integer(row[0], "week"), 0);
    if (week_col.empty()) throw InvalidInput(path + ": no data rows");
    Eigen::Index col = 0;
    std::vector<int> weeks;
    for (auto& [week, c] : week_col) {
        if (week <= 0) throw InvalidInput(path + ": week must be a positive integer, got " + std::to_string(week));
        c = col++;
        weeks.push_back(static_cast<int>(week));
    }

    const auto m = static_cast<Eigen::Index>(hierarchy.size());
    const auto n = col;
    Matrix sales = Matrix::Constant(m, n, std::nan(""));
    Matrix price = Matrix::Constant(m, n, std::nan(""));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = path + ":" + std::to_string(table.line_numbers[r]);
        auto node = hierarchy.find(row[1]);
        if (!node) throw InvalidInput(where + ": unknown node '" + row[1] + "'");
        const auto i = static_cast<Eigen::Index>(*node);
        const auto t = week_col.at(parse_integer(row[0], "week"));
        if (!std::isnan(sales(i, t))) throw InvalidInput(where + ": duplicate row for node '" + row[1] + "'");
        const double s = parse_double(row[2], "sales");
        const double p = parse_double(row[3], "price");
        if (!std::isfinite(s) || s < 0.0) throw InvalidInput(where + ": sales must be finite and non-negative");
        if (!std::isfinite(p) || p <= 0.0) throw InvalidInput(where + ": price must be finite and positive");
        sales(i, t) = s;
        price(i, t) = p;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index t = 0; t < n; ++t) {
            if (std::isnan(sales(i, t))) {
                throw InvalidInput(path + ": missing value for node '" + hierarchy.node(static_cast<std::size_t>(i)).id +
                                   "' in week " + std::to_string(weeks[static_cast<std::size_t>(t)]));
            }
        }
    }
    for (std::size_t i = 0; i < hierarchy.size(); ++i) {
        const auto& kids = hierarchy.node(i).children;
        if (kids.empty()) continue;
        for (Eigen::Index t = 0; t < n; ++t) {
            double sum = 0.0;
            for (auto c : kids) sum += sales(static_cast<Eigen::Index>(c), t);
            const double v = sales(static_cast<Eigen::Index>(i), t);
            if (std::abs(v - sum) > 1e-9 * std::max(1.0, std::abs(v))) {
                throw InvalidInput(path + ": incoherent sales for '" + hierarchy.node(i).id + "' in week " +
                                   std::to_string(weeks[static_cast<std::size_t>(t)]) + " (" + format_double(v) +
                                   " vs children sum " + format_double(sum) + ")");
            }
        }
    }

    SeriesPanel panel;
    panel.node_ids = hierarchy.ids();
    panel.weeks = std::move(weeks);
    panel.sales = std::move(sales);
    panel.price = std::move(price);
    return panel;
}

void write_panel_csv(const std::string& path, const SeriesPanel& panel) {
    std::ostringstream out;
    out << "week,node_id,sales,price\n";
    for (Eigen::Index t = 0; t < panel.week_count(); ++t) {
        for (Eigen::Index i = 0; i < panel.node_count(); ++i) {
            out << panel.weeks[static_cast<std::size_t>(t)] << ',' << panel.node_ids[static_cast<std::size_t>(i)] << ','
                << format_double(panel.sales(i, t)) << ',' << format_double(panel.price(i, t)) << '\n';
        }
    }
    write_file_atomic(path, out.str());
}

}  // namespace hfc
