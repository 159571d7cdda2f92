#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "heatup/schedule.hpp"

namespace heatup {

// Checkpoint file layout:
//   bytes 0..7   magic "HUPEMB01"
//   u32 LE       length of the JSON descriptor
//   ...          UTF-8 JSON descriptor (version, arch, rng state, epoch
//                position, named block table, embedded run config)
//   ...          the blocks: 64-bit little-endian floats, in the order the
//                descriptor lists them (parameters in declaration order,
//                then batch-norm running stats, then optimizer velocity)
//   u32 LE       CRC-32 (IEEE) of everything after the magic
//
// A load rebuilds the trainer from scratch and fails atomically: wrong
// magic, truncation, version and checksum problems each raise their own
// error type and leave no partial state behind.
void save_checkpoint(const TrainerState& st, const std::string& path,
                     const nlohmann::json& run_config = nlohmann::json());

TrainerState load_checkpoint(const std::string& path, nlohmann::json* run_config = nullptr);

std::uint32_t crc32(const unsigned char* data, std::size_t len);

}  // namespace heatup
