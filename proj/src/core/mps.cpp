#include "drmdp/lp.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace drmdp::lp {

namespace {

std::string row_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "R%07d", i);
    return buf;
}

std::string col_name(int j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "C%07d", j);
    return buf;
}

// Values must fit the 12-character numeric fields.
std::string num(double v) {
    char buf[32];
    for (int prec = 12; prec > 0; --prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::string(buf).size() <= 12) break;
    }
    return buf;
}

void field_line(std::ostream& os, const char* code, const std::string& n1, const std::string& n2,
                const std::string& v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " %-2s %-8s  %-8s  %12s", code, n1.c_str(), n2.c_str(), v.c_str());
    os << buf << '\n';
}

} // namespace

void write_mps(const LinearProgram& lp, std::ostream& os, std::string_view name) {
    os << "NAME          " << name << '\n';
    if (lp.objective() == Objective::Maximize) os << "OBJSENSE\n    MAX\n";
    os << "ROWS\n N  COST\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        const char* code = lp.row(i).sense == Sense::Le ? "L" : lp.row(i).sense == Sense::Ge ? "G" : "E";
        os << ' ' << code << "  " << row_name(i) << '\n';
    }

    // Column-major view of the row-wise matrix.
    std::vector<std::vector<std::pair<int, double>>> cols(lp.num_vars());
    for (int i = 0; i < lp.num_rows(); ++i)
        for (const auto& t : lp.row(i).terms)
            if (t.coef != 0.0) cols[t.var].emplace_back(i, t.coef);

    os << "COLUMNS\n";
    for (int j = 0; j < lp.num_vars(); ++j) {
        if (lp.var(j).cost != 0.0) field_line(os, "", col_name(j), "COST", num(lp.var(j).cost));
        for (const auto& [i, a] : cols[j]) field_line(os, "", col_name(j), row_name(i), num(a));
        if (lp.var(j).cost == 0.0 && cols[j].empty()) field_line(os, "", col_name(j), "COST", "0");
    }
    os << "RHS\n";
    for (int i = 0; i < lp.num_rows(); ++i)
        if (lp.row(i).rhs != 0.0) field_line(os, "", "RHS", row_name(i), num(lp.row(i).rhs));

    os << "BOUNDS\n";
    for (int j = 0; j < lp.num_vars(); ++j) {
        const Variable& v = lp.var(j);
        const bool flo = std::isfinite(v.lo), fhi = std::isfinite(v.hi);
        if (flo && fhi && v.lo == v.hi) {
            field_line(os, "FX", "BND", col_name(j), num(v.lo));
            continue;
        }
        if (!flo && !fhi) {
            field_line(os, "FR", "BND", col_name(j), "");
            continue;
        }
        if (!flo) field_line(os, "MI", "BND", col_name(j), "");
        else if (v.lo != 0.0) field_line(os, "LO", "BND", col_name(j), num(v.lo));
        if (fhi) field_line(os, "UP", "BND", col_name(j), num(v.hi));
    }
    os << "ENDATA\n";
}

} // namespace drmdp::lp
