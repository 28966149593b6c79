#include "fleetgrid/mps.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fleetgrid {

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Two-field data line in fixed-format layout: fields at columns 5, 15, 25.
void write_entry(std::ofstream& out, const std::string& a, const std::string& b,
                 const std::string& c) {
    out << "    " << a;
    for (std::size_t i = a.size(); i < 10; ++i) out << ' ';
    out << b;
    if (!c.empty()) {
        for (std::size_t i = b.size(); i < 10; ++i) out << ' ';
        out << c;
    }
    out << '\n';
}

void write_bound(std::ofstream& out, const char* kind, const std::string& col,
                 const std::string& value = {}) {
    out << ' ' << kind << "  BND       " << col;
    if (!value.empty()) {
        for (std::size_t i = col.size(); i < 10; ++i) out << ' ';
        out << value;
    }
    out << '\n';
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream iss(line);
    std::string f;
    while (iss >> f) fields.push_back(f);
    return fields;
}

double parse_value(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw std::runtime_error("MPS: bad numeric field '" + s + "'");
    }
}

}  // namespace

std::string mangled_column_name(std::size_t index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "X%07zu", index);
    return buf;
}

std::string mangled_row_name(std::size_t index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "R%07zu", index);
    return buf;
}

void export_mps(const LpModel& model_in, const std::filesystem::path& destination) {
    if (model_in.num_variables() > 9'999'999 || model_in.num_rows() > 9'999'999)
        throw std::runtime_error("MPS export: model too large for the mangling scheme");
    LpModel model = model_in;
    model.canonicalize();

    std::ofstream out(destination);
    if (!out) throw std::runtime_error("cannot open " + destination.string() + " for writing");

    out << "NAME          FLEETGRID\n";
    out << "ROWS\n";
    out << " N  COST\n";
    for (std::size_t r = 0; r < model.num_rows(); ++r) {
        const auto& row = model.row(static_cast<RowId>(r));
        out << ' ' << static_cast<char>(row.sense) << "  " << mangled_row_name(r) << '\n';
    }

    // COLUMNS needs row-major-by-column entries: gather each variable's rows.
    std::vector<std::vector<std::pair<RowId, double>>> by_col(model.num_variables());
    for (std::size_t r = 0; r < model.num_rows(); ++r)
        for (const auto& [v, c] : model.row(static_cast<RowId>(r)).coefs)
            by_col[static_cast<std::size_t>(v)].emplace_back(static_cast<RowId>(r), c);

    out << "COLUMNS\n";
    for (std::size_t v = 0; v < model.num_variables(); ++v) {
        const auto& var = model.variable(static_cast<VarId>(v));
        const auto col = mangled_column_name(v);
        if (var.obj != 0.0) write_entry(out, col, "COST", format_value(var.obj));
        for (const auto& [r, c] : by_col[v])
            write_entry(out, col, mangled_row_name(static_cast<std::size_t>(r)),
                        format_value(c));
        if (var.obj == 0.0 && by_col[v].empty())
            write_entry(out, col, "COST", "0");  // keep empty columns discoverable
    }

    out << "RHS\n";
    for (std::size_t r = 0; r < model.num_rows(); ++r) {
        const auto& row = model.row(static_cast<RowId>(r));
        if (row.rhs != 0.0)
            write_entry(out, "RHS", mangled_row_name(r), format_value(row.rhs));
    }

    out << "BOUNDS\n";
    for (std::size_t v = 0; v < model.num_variables(); ++v) {
        const auto& var = model.variable(static_cast<VarId>(v));
        const auto col = mangled_column_name(v);
        const bool lb_inf = std::isinf(var.lb);
        const bool ub_inf = std::isinf(var.ub);
        if (!lb_inf && !ub_inf && var.lb == var.ub) {
            write_bound(out, "FX", col, format_value(var.lb));
            continue;
        }
        if (lb_inf && ub_inf) {
            write_bound(out, "FR", col);
            continue;
        }
        if (lb_inf)
            write_bound(out, "MI", col);
        else if (var.lb != 0.0)
            write_bound(out, "LO", col, format_value(var.lb));
        if (!ub_inf) write_bound(out, "UP", col, format_value(var.ub));
    }
    out << "ENDATA\n";
    out.flush();
    if (!out) throw std::runtime_error("write failure on " + destination.string());

    std::ofstream names(destination.string() + ".names");
    if (!names)
        throw std::runtime_error("cannot open sidecar name map for " + destination.string());
    for (std::size_t v = 0; v < model.num_variables(); ++v)
        names << "col " << mangled_column_name(v) << ' '
              << model.variable(static_cast<VarId>(v)).name << '\n';
    for (std::size_t r = 0; r < model.num_rows(); ++r)
        names << "row " << mangled_row_name(r) << ' ' << model.row(static_cast<RowId>(r)).name
              << '\n';
    names.flush();
    if (!names) throw std::runtime_error("write failure on sidecar name map");
}

LpModel import_mps(const std::filesystem::path& source) {
    std::ifstream in(source);
    if (!in) throw std::runtime_error("cannot open " + source.string());

    std::unordered_map<std::string, std::string> col_names, row_names;
    {
        std::ifstream names(source.string() + ".names");
        std::string kind, mangled;
        std::string line;
        while (names && std::getline(names, line)) {
            if (line.empty()) continue;
            std::istringstream iss(line);
            iss >> kind >> mangled;
            std::string original;
            std::getline(iss, original);
            if (!original.empty() && original.front() == ' ') original.erase(0, 1);
            if (kind == "col")
                col_names[mangled] = original;
            else if (kind == "row")
                row_names[mangled] = original;
        }
    }
    auto column_name = [&](const std::string& m) {
        auto it = col_names.find(m);
        return it == col_names.end() ? m : it->second;
    };
    auto row_name = [&](const std::string& m) {
        auto it = row_names.find(m);
        return it == row_names.end() ? m : it->second;
    };

    struct RawRow {
        RowSense sense;
        std::string name;
    };
    std::vector<RawRow> rows;
    std::unordered_map<std::string, std::size_t> row_index;
    std::string objective_row;

    struct RawCol {
        std::string name;
        double obj = 0.0;
        double lb = 0.0;
        double ub = kInf;
        bool lb_set = false;
        std::vector<std::pair<std::size_t, double>> entries;
    };
    std::vector<RawCol> cols;
    std::unordered_map<std::string, std::size_t> col_index;
    std::vector<double> rhs_values;

    enum class Section { none, rows, columns, rhs, bounds, ranges, done };
    Section section = Section::none;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '*') continue;
        if (!std::isspace(static_cast<unsigned char>(line[0]))) {
            auto fields = split_fields(line);
            const std::string& head = fields[0];
            if (head == "NAME")
                continue;
            else if (head == "ROWS")
                section = Section::rows;
            else if (head == "COLUMNS")
                section = Section::columns;
            else if (head == "RHS")
                section = Section::rhs;
            else if (head == "RANGES")
                throw std::runtime_error("MPS import: RANGES section not supported");
            else if (head == "BOUNDS")
                section = Section::bounds;
            else if (head == "ENDATA") {
                section = Section::done;
                break;
            } else
                throw std::runtime_error("MPS import: unknown section '" + head + "'");
            continue;
        }
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        switch (section) {
            case Section::rows: {
                if (fields.size() != 2) throw std::runtime_error("MPS: bad ROWS line: " + line);
                const std::string& type = fields[0];
                if (type == "N") {
                    if (objective_row.empty()) objective_row = fields[1];
                    // additional free rows are ignored
                } else {
                    RowSense sense;
                    if (type == "L")
                        sense = RowSense::le;
                    else if (type == "G")
                        sense = RowSense::ge;
                    else if (type == "E")
                        sense = RowSense::eq;
                    else
                        throw std::runtime_error("MPS: unknown row type " + type);
                    row_index.emplace(fields[1], rows.size());
                    rows.push_back({sense, fields[1]});
                }
                break;
            }
            case Section::columns: {
                if (fields.size() != 3 && fields.size() != 5)
                    throw std::runtime_error("MPS: bad COLUMNS line: " + line);
                auto [it, inserted] = col_index.emplace(fields[0], cols.size());
                if (inserted) {
                    cols.emplace_back();
                    cols.back().name = fields[0];
                }
                RawCol& col = cols[it->second];
                for (std::size_t k = 1; k + 1 < fields.size(); k += 2) {
                    const std::string& rname = fields[k];
                    double value = parse_value(fields[k + 1]);
                    if (rname == objective_row) {
                        col.obj = value;
                    } else {
                        auto rit = row_index.find(rname);
                        if (rit == row_index.end())
                            throw std::runtime_error("MPS: entry for unknown row " + rname);
                        if (value != 0.0) col.entries.emplace_back(rit->second, value);
                    }
                }
                break;
            }
            case Section::rhs: {
                if (fields.size() != 3 && fields.size() != 5)
                    throw std::runtime_error("MPS: bad RHS line: " + line);
                if (rhs_values.empty()) rhs_values.assign(rows.size(), 0.0);
                for (std::size_t k = 1; k + 1 < fields.size(); k += 2) {
                    auto rit = row_index.find(fields[k]);
                    if (rit == row_index.end())
                        throw std::runtime_error("MPS: RHS for unknown row " + fields[k]);
                    rhs_values[rit->second] = parse_value(fields[k + 1]);
                }
                break;
            }
            case Section::bounds: {
                if (fields.size() < 3) throw std::runtime_error("MPS: bad BOUNDS line: " + line);
                const std::string& kind = fields[0];
                auto cit = col_index.find(fields[2]);
                if (cit == col_index.end())
                    throw std::runtime_error("MPS: bound for unknown column " + fields[2]);
                RawCol& col = cols[cit->second];
                double value = fields.size() >= 4 ? parse_value(fields[3]) : 0.0;
                if (kind == "LO") {
                    col.lb = value;
                    col.lb_set = true;
                } else if (kind == "UP") {
                    col.ub = value;
                    // Classic MPS quirk: UP with a negative value and no prior
                    // LO implies a free lower bound.
                    if (value < 0.0 && !col.lb_set) col.lb = -kInf;
                } else if (kind == "FX") {
                    col.lb = col.ub = value;
                    col.lb_set = true;
                } else if (kind == "FR") {
                    col.lb = -kInf;
                    col.ub = kInf;
                } else if (kind == "MI") {
                    col.lb = -kInf;
                } else if (kind == "PL") {
                    col.ub = kInf;
                } else {
                    throw std::runtime_error("MPS: unsupported bound type " + kind);
                }
                break;
            }
            default: throw std::runtime_error("MPS: data line outside a section: " + line);
        }
    }
    if (section != Section::done) throw std::runtime_error("MPS: missing ENDATA");
    if (rhs_values.empty()) rhs_values.assign(rows.size(), 0.0);

    LpModel model;
    std::vector<VarId> var_ids;
    var_ids.reserve(cols.size());
    for (const auto& col : cols)
        var_ids.push_back(model.add_variable(column_name(col.name), col.lb, col.ub, col.obj));
    std::vector<RowId> row_ids;
    row_ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        row_ids.push_back(model.add_row(row_name(rows[r].name), rows[r].sense, rhs_values[r]));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (const auto& [r, value] : cols[c].entries)
            model.add_coef(row_ids[r], var_ids[c], value);
    model.canonicalize();
    return model;
}

}  // namespace fleetgrid
