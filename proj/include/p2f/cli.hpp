#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace p2f::cli {

enum class Status { Pass, Warn, Fail };
std::string to_string(Status s);

struct CheckResult {
    std::string id;
    std::string anchor;
    std::string expected;
    std::string got;
    Status status = Status::Pass;
    std::string warn_class;  // set only on WARN entries
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    double seconds = 0;

    std::size_t count(Status s) const;
    bool ok() const { return count(Status::Fail) == 0; }
};

VerifyReport verify_paper();
nlohmann::json to_json(const VerifyReport& r);
VerifyReport report_from_json(const nlohmann::json& j);

// args excludes the program name; returns the process exit code
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace p2f::cli
