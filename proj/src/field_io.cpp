#include "mfg/field_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace mfg {

std::string format_exact(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_field_csv(std::ostream& out, const ScalarField& f)
{
    const TorusGrid& g = f.grid();
    out << "# " << g.dim() << ',' << g.n() << '\n';
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto ij = g.multi_index(k);
        out << k << ',' << format_exact(g.coord(ij[0]));
        if (g.dim() == 2) out << ',' << format_exact(g.coord(ij[1]));
        out << ',' << format_exact(f[k]) << '\n';
    }
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_field_csv(out, f);
}

namespace {

double parse_double(std::string_view s, std::size_t line)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("field csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace

ScalarField read_field_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("field csv: missing '# dim,n' header");
    int dim = 0;
    int n = 0;
    {
        std::istringstream hs(line.substr(2));
        char comma = 0;
        if (!(hs >> dim >> comma >> n) || comma != ',') throw std::runtime_error("field csv: malformed header '" + line + "'");
    }
    TorusGrid grid(dim, n);
    std::vector<double> values(grid.size());
    std::vector<bool> seen(grid.size(), false);
    std::size_t lineno = 1;
    const std::size_t expected_cols = dim == 1 ? 3 : 4;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> cols;
        std::string_view rest(line);
        while (true) {
            const auto pos = rest.find(',');
            cols.push_back(rest.substr(0, pos));
            if (pos == std::string_view::npos) break;
            rest.remove_prefix(pos + 1);
        }
        if (cols.size() != expected_cols) throw std::runtime_error("field csv line " + std::to_string(lineno) + ": wrong column count");
        const double idx = parse_double(cols[0], lineno);
        if (idx < 0 || idx >= static_cast<double>(grid.size()))
            throw std::runtime_error("field csv line " + std::to_string(lineno) + ": index out of range");
        const auto k = static_cast<std::size_t>(idx);
        values[k] = parse_double(cols.back(), lineno);
        seen[k] = true;
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
        if (!seen[k]) throw std::runtime_error("field csv: missing node " + std::to_string(k));
    return ScalarField(grid, std::move(values));
}

ScalarField read_field_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_field_csv(in);
}

}  // namespace mfg
