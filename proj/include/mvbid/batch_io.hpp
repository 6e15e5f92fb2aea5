#pragma once

#include <filesystem>
#include <vector>

#include "mvbid/bid_log.hpp"
#include "mvbid/experiment.hpp"

namespace mvbid {

/// On-disk batch layout:
///   <dir>/campaigns.json            specs plus relative log paths
///   <dir>/<campaign_id>/train.<ext>
///   <dir>/<campaign_id>/tune.<ext>
///   <dir>/<campaign_id>/test.<ext>
/// Returns the paths written, relative to dir.
std::vector<std::filesystem::path> write_batch(const std::filesystem::path& dir,
                                               const std::vector<CampaignData>& batch,
                                               LogFormat format = LogFormat::csv);

/// Throws DataError when campaigns.json or a log is missing or malformed.
std::vector<CampaignData> read_batch(const std::filesystem::path& dir);

}  // namespace mvbid
