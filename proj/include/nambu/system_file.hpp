#pragma once

#include <filesystem>

#include "nambu/flow.hpp"
#include "nambu/json_io.hpp"

namespace nambu {

struct SystemFileError : std::runtime_error {
    SystemFileError(const std::string& where, const std::string& msg)
        : std::runtime_error(where + ": " + msg), location(where) {}
    std::string location;
};

// On-disk system definition. Indices and variable names are 1-based in the
// file and canonicalized on load.
struct SystemFile {
    std::string label;
    int n = 0;
    SkewField3 tensor = SkewField3::constant(levi_civita());
    std::string g_text, h_text;
    ScalarField g, h;
    Box sample_box;
    std::uint64_t seed = 0;
    IntegratorConfig integrator;
    std::optional<State> initial_state;
};

SystemFile parse_system_json(const Json& j);
SystemFile load_system_file(const std::filesystem::path& path);

/// The contravariant operator: direct, or inverted from a constant covariant
/// tensor. Throws when neither route applies.
PoissonOperator3 operator_from(const SystemFile& sf, double tol = 1e-10);

/// The covariant 3-form: direct, or inverted from a constant contravariant
/// tensor. Throws when neither route applies.
SymplecticForm3 form_from(const SystemFile& sf, double tol = 1e-10);

NambuSystem to_nambu_system(const SystemFile& sf, double tol = 1e-10);

} // namespace nambu
