#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcl/jsonio.hpp"

namespace qcl {

struct AuditCheck {
    std::string name;
    bool pass;
    Json detail;
    double seconds;  // wall clock, not part of the JSON payload
};

struct AuditReport {
    std::string suite;
    std::uint64_t seed;
    std::vector<AuditCheck> checks;

    bool pass() const;
    Json to_json() const;
};

const std::vector<std::string>& audit_suites();
AuditReport run_audit(const std::string& suite, std::uint64_t seed = 1);

}  // namespace qcl
