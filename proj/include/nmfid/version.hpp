#ifndef NMFID_VERSION_HPP
#define NMFID_VERSION_HPP

namespace nmfid {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace nmfid

#endif  // NMFID_VERSION_HPP
