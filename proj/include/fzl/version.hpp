#ifndef FZL_VERSION_HPP
#define FZL_VERSION_HPP

namespace fzl {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
