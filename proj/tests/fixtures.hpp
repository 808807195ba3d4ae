// Shared source fixtures for the test suites.

#pragma once

namespace metamorph::fixtures {

// ApplicationAttemptId.compareTo before and after renaming `other`.
inline constexpr const char* kCompareToOriginal = R"(public int compareTo(ApplicationAttemptId other) {
    int compareAppIds = this.getApplicationId()
        .compareTo(other.getApplicationId());
    if (compareAppIds == 0) {
        return this.getAttemptId() - other.getAttemptId();
    } else {
        return compareAppIds;
    }
}
)";

inline constexpr const char* kCompareToRenamed = R"(public int compareTo(ApplicationAttemptId var0) {
    int compareAppIds = this.getApplicationId()
        .compareTo(var0.getApplicationId());
    if (compareAppIds == 0) {
        return this.getAttemptId() - var0.getAttemptId();
    } else {
        return compareAppIds;
    }
}
)";

}  // namespace metamorph::fixtures
