#ifndef INFOQUANT_VERSION_HPP
#define INFOQUANT_VERSION_HPP

namespace iq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace iq

#endif  // INFOQUANT_VERSION_HPP
