#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "villa/corpus.hpp"
#include "villa/embedding.hpp"
#include "villa/responder.hpp"

namespace villa {

/// Embedder from a spec string:
///   mock                     seed 7, dim 256
///   mock:<seed>:<dim>
///   remote:<model>:<dim>     EMBEDDER_BASE_URL, EMBEDDER_API_KEY,
///                            EMBEDDER_QUERY_MODEL, EMBEDDER_MAX_CHARS
std::unique_ptr<Embedder> make_embedder(std::string_view spec, std::size_t jobs = 1);

/// Responder from a spec string:
///   mock:oracle              needs the ground truth
///   mock:empty               always answers with no mutations
///   remote:<model>           RESPONDER_BASE_URL, RESPONDER_API_KEY
std::unique_ptr<Responder> make_responder(std::string_view spec, const GroundTruthDataset* gt);

/// Entry point of the `villa` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on a runtime failure, 2 on a usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace villa
