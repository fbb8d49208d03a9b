#pragma once

#include <functional>

namespace taskcl::detail {

/// Runs `fn` to completion on a thread with a large stack and rethrows
/// whatever it threw.
void run_with_large_stack(const std::function<void()>& fn);

}  // namespace taskcl::detail
