#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chblab/config.hpp"
#include "chblab/grid.hpp"

namespace chb {

/// Legacy VTK STRUCTURED_POINTS file with one CELL_DATA scalar per entry.
void write_vtk(const std::string& path, const Grid2D& g,
               const std::vector<std::pair<std::string, const ScalarField*>>& fields);

/// Plain CSV with a header row; numbers use 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct Manifest {
    std::string command;
    RunConfig config;
    std::vector<std::string> files;
    std::vector<std::pair<std::string, std::string>> summary;
};

void write_manifest(const std::string& path, const Manifest& m);

std::string library_version();

}  // namespace chb
