#pragma once

#include "splitauth/message.hpp"
#include "splitauth/store.hpp"

namespace splitauth {

/// Share-server request handler: SharePut, ShareGet and ShareDel, one reply
/// per request. Stateless apart from the store.
Message shareserver_on_message(const Message& message, ShareStore& store);

} // namespace splitauth
