#pragma once
/// Orchestration behind the command-line tool: load a problem, solve for
/// multipliers, reconstruct fluxes by the requested or auto-selected
/// methods, verify, and emit a deterministic JSON report.

#include <optional>
#include <string>
#include <vector>

namespace conslaw {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    exit_ok = 0,
    exit_error = 1,          // unexpected failure (bad alloc, internal bug surfaced)
    exit_parse = 2,          // unreadable or invalid input
    exit_empty = 3,          // well-posed run with an empty answer
    exit_inapplicable = 4,   // a requested method cannot run on this input
    exit_verification = 5,   // a produced object failed verification
};

struct RunOptions {
    std::string problem_path;
    std::vector<std::string> methods;       ///< overrides the document's methods
    std::optional<int> degree;              ///< overrides the ansatz total degree
    std::optional<std::string> deps;        ///< "t,x,u,u_x,u_xx": overrides ansatz atoms
    std::optional<std::string> base_point;  ///< "u=x": overrides the document
    std::optional<std::string> weights;     ///< "x=1,t=3,u=-2": overrides the document
    bool latex = false;                     ///< add LaTeX display lines to diagnostics
};

/// One structured diagnostic; never part of the report stream.
struct Diagnostic {
    std::string severity;  // "error" | "warning" | "note" | "display"
    std::string context;   // e.g. "homotopy1, multiplier 2" or "" for global
    std::string message;
};

struct RunResult {
    int exit_code = exit_ok;
    std::string report;  ///< JSON document, newline-terminated; empty only on early parse failure
    std::vector<Diagnostic> diagnostics;
};

/// `multipliers`: solve the determining equations over the ansatz and
/// report the basis. Empty basis => exit_empty with an empty report.
RunResult run_multipliers(const RunOptions& opts);

/// `fluxes`: multipliers first, then one law per multiplier and method.
/// Method failures become diagnostics plus report entries; exit_inapplicable
/// only when no law could be produced at all.
RunResult run_fluxes(const RunOptions& opts);

/// `verify`: fluxes first, then the independent checks on every law;
/// any failed check => exit_verification.
RunResult run_verify(const RunOptions& opts);

}  // namespace conslaw
