#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mor/model.hpp"

namespace mor {

/// Text archive for an LtiModel.
///
/// Layout (version 1), one record per line:
///
///   mor-archive 1
///   dims <n> <m> <p> <d>
///   meta <key> <value...>            zero or more
///   block <name> <rows> <cols> <nnz> followed by nnz lines "<i> <j> <value>"
///   checksum <16 hex digits>
///
/// Blocks appear in the order E, A0, A1..Ad, B, C and optionally M (the
/// energy product). Values use 17 significant digits so a round trip is
/// exact. The checksum is 64-bit FNV-1a over every byte before the checksum
/// line.
inline constexpr int kArchiveVersion = 1;

struct ArchivedModel {
  LtiModel model;
  std::map<std::string, std::string> metadata;
  std::string checksum;
};

/// Writes the archive; returns the checksum. Throws kIo on write failure.
std::string save_model(const std::filesystem::path& path, const LtiModel& model,
                       const std::map<std::string, std::string>& metadata = {});

/// Reads and verifies an archive. Throws kIo when the file is missing,
/// malformed, of another version or fails the checksum.
ArchivedModel load_model(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace mor
