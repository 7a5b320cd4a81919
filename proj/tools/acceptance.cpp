#include "fluxrabi/app/checks.hpp"
#include "fluxrabi/linalg.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

// Usage: fluxrabi_acceptance [id ...]
int main(int argc, char** argv) {
    using namespace fluxrabi::app;
    fluxrabi::set_blas_threads(1);
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty()) {
        for (int i = 1; i <= criterion_count; ++i) ids.push_back(i);
    }
    int failed = 0;
    for (int id : ids) {
        const Criterion c = evaluate_criteria({id}).front();
        std::cout << summary_line(c) << std::endl;
        failed += !c.pass();
    }
    std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
