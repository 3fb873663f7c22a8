#pragma once

namespace qchan {

inline constexpr const char* kVersionTag = "0.1.0";

}  // namespace qchan
