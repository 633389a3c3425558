#pragma once

namespace xbx::cli {

int run(int argc, char** argv);

}  // namespace xbx::cli
