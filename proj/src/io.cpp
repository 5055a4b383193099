#include "chblab/io.hpp"

#include <Eigen/Core>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "json.hpp"

namespace chb {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << std::setprecision(17);
    return f;
}

}  // namespace

void write_vtk(const std::string& path, const Grid2D& g,
               const std::vector<std::pair<std::string, const ScalarField*>>& fields) {
    auto f = open_out(path);
    f << "# vtk DataFile Version 3.0\nchb-lab cell data\nASCII\nDATASET STRUCTURED_POINTS\n";
    f << "DIMENSIONS " << g.nx + 1 << ' ' << g.ny + 1 << " 1\n";
    f << "ORIGIN 0 0 0\nSPACING " << g.hx() << ' ' << g.hy() << " 1\n";
    f << "CELL_DATA " << g.cells() << '\n';
    for (const auto& [name, field] : fields) {
        if (!(field->grid == g)) throw GridMismatch();
        f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int k = 0; k < g.cells(); ++k) f << field->values[k] << '\n';
    }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    auto f = open_out(path);
    for (size_t k = 0; k < header.size(); ++k) f << (k ? "," : "") << header[k];
    f << '\n';
    for (const auto& r : rows) {
        for (size_t k = 0; k < r.size(); ++k) f << (k ? "," : "") << r[k];
        f << '\n';
    }
}

std::string library_version() { return "0.1.0"; }

void write_manifest(const std::string& path, const Manifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["version"] = library_version();
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    j["seed"] = m.config.seed;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : m.config.echo) {
        std::visit([&](const auto& x) { cfg[k] = x; }, v);
    }
    j["config"] = cfg;
    j["files"] = m.files;
    nlohmann::json s = nlohmann::json::object();
    for (const auto& [k, v] : m.summary) s[k] = v;
    j["summary"] = s;
    auto f = open_out(path);
    f << j.dump(2) << '\n';
}

}  // namespace chb
