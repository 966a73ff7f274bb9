#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fixlab {

/// Outcome of a sampled check on a comparison function or a sequence.
///
/// `holds == true` on a sampled property means no counterexample was found
/// under the recorded plan; `status` says which kind of evidence backs it.
struct Verdict {
    std::string check;
    bool holds = true;
    std::optional<double> witness;
    std::optional<double> witness_value;
    std::vector<double> bad_points;  // ascending
    std::size_t checked_count = 0;
    std::string status;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> notes;
};

}  // namespace fixlab
