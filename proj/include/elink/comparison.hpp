#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "elink/electre.hpp"

namespace elink {

// One candidate pair (a, b) from the comparison space A x B.
struct ComparisonVector {
    std::string id_a;
    std::string id_b;
    std::vector<double> performances;  // one similarity in [0,1] per compared field
    std::optional<Category> label;     // ground truth, when known

    friend bool operator==(const ComparisonVector&, const ComparisonVector&) = default;
};

}  // namespace elink
