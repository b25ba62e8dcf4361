#pragma once

// Exact edit-distance baselines and transformation scripts.
//
// Strings are byte sequences; two symbols match iff the bytes are equal.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subquad {

enum class EditKind : std::uint8_t { insert, remove, substitute };

/// One edit applied to the intermediate string. `position` indexes the string
/// as it exists when the op is applied; `symbol` is ignored for removals.
struct EditOp {
    EditKind kind = EditKind::insert;
    std::size_t position = 0;
    char symbol = '\0';

    static EditOp insert(std::size_t pos, char c) { return {EditKind::insert, pos, c}; }
    static EditOp remove(std::size_t pos) { return {EditKind::remove, pos, '\0'}; }
    static EditOp substitute(std::size_t pos, char c) { return {EditKind::substitute, pos, c}; }

    friend bool operator==(const EditOp &, const EditOp &) = default;
};

struct TransformationScript {
    std::vector<EditOp> ops;

    [[nodiscard]] std::size_t size() const noexcept { return ops.size(); }
    [[nodiscard]] bool empty() const noexcept { return ops.empty(); }
};

struct ExactEdit {
    std::int64_t distance = 0;
    TransformationScript script;
};

class MalformedScript : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Full O(|s1|·|s2|) dynamic program with traceback. The script lists ops in
/// left-to-right order, so positions refer to the partially edited string.
[[nodiscard]] ExactEdit edit_exact(std::string_view s1, std::string_view s2);

/// Distance only, two-row dynamic program.
[[nodiscard]] std::int64_t edit_distance(std::string_view s1, std::string_view s2);

/// Furthest-reaching-diagonal search (Landau-Vishkin). Returns the distance if it
/// is at most `d_max`. Extensions scan characters directly, so the worst case is
/// O(n·d_max) rather than O(n + d_max²).
[[nodiscard]] std::optional<std::int64_t> edit_bounded(std::string_view s1, std::string_view s2,
                                                       std::int64_t d_max);

/// Same search as edit_bounded, keeping every wavefront to recover a script.
[[nodiscard]] std::optional<ExactEdit> edit_bounded_script(std::string_view s1, std::string_view s2,
                                                           std::int64_t d_max);

/// Applies ops in order. Throws MalformedScript on an out-of-range position.
[[nodiscard]] std::string apply_script(std::string_view s, const TransformationScript &script);

/// True iff applying the script to s1 yields s2. A malformed script is invalid.
[[nodiscard]] bool validate_script(std::string_view s1, std::string_view s2,
                                   const TransformationScript &script);

/// Deletes all of s1 at position 0 and then inserts s2 left to right.
[[nodiscard]] TransformationScript trivial_script(std::string_view s1, std::string_view s2);

}  // namespace subquad
