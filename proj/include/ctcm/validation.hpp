#ifndef CTCM_VALIDATION_HPP
#define CTCM_VALIDATION_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ctcm {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // empty on pass
};

struct ValidationOptions {
    bool quick = false; // reduced ensembles and grids, same checks
    int threads = 0;    // <= 0: environment default
};

// The full battery behind `validate --level full`; quick shrinks the
// statistical scales but keeps every check armed.
std::vector<CriterionResult> run_validation(const ValidationOptions& opt);

// Prints one [PASS]/[FAIL] line per criterion; returns 0 when all pass.
int report_validation(std::ostream& os, const std::vector<CriterionResult>& results);

// Negative control: runs a path with a deliberately understated perturbation
// radius and checks that the bounds auditor flags it. Returns true when the
// fault is caught.
bool fault_injection_catches_understated_radius(std::ostream& os);

} // namespace ctcm

#endif
