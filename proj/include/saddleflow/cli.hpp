#pragma once

namespace saddleflow {

/// Entry point of the saddleflow tool. Exit codes:
///   0  success
///   1  condition or tolerance failure (verdicts still printed)
///   2  usage / configuration error
///   3  numerical failure (partial CSV still written with a marker row)
int cli_main(int argc, const char* const* argv);

}  // namespace saddleflow
