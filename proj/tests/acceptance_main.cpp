// Full self-check battery, one line per criterion. Exit code 0 only when all
// pass. Runtime is dominated by the velocity grid; expect minutes, not
// seconds (see README).

#include <chrono>
#include <iostream>

#include "ctcm/validation.hpp"

int main() {
    ctcm::ValidationOptions opt;
    opt.quick = false;
    opt.threads = 0;

    const auto start = std::chrono::steady_clock::now();
    const auto results = ctcm::run_validation(opt);
    const int code = ctcm::report_validation(std::cout, results);
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - start);
    std::cout << "acceptance battery finished in " << secs.count() << "s\n";
    return code;
}
