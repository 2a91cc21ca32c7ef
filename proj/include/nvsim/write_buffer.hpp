#ifndef NVSIM_WRITE_BUFFER_HPP
#define NVSIM_WRITE_BUFFER_HPP

#include <bitset>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>

#include "nvsim/crypto.hpp"

namespace nvsim {

/// Page-granularity write-combining buffer. Entries coalesce line
/// writes to one page; the FIFO-oldest entry is forced out when a new
/// allocation would exceed capacity.
class WriteBuffer {
  public:
    struct Entry {
        std::uint64_t page_index = 0;
        std::bitset<kLinesPerPage> lines;
        Page data; // only bytes of set lines are meaningful
    };

    struct EnqueueResult {
        bool merged = false;
        std::optional<Entry> forced_drain;
    };

    explicit WriteBuffer(std::uint32_t capacity_pages = 8)
        : capacity_(capacity_pages) {}

    std::uint32_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    bool hasPage(std::uint64_t page_index) const;
    bool hasLine(std::uint64_t page_index, std::uint32_t line) const;

    /// Buffered bytes for a line, or nullptr when not buffered.
    const std::uint8_t* lineData(std::uint64_t page_index,
                                 std::uint32_t line) const;

    EnqueueResult enqueue(std::uint64_t page_index, std::uint32_t line,
                          std::span<const std::uint8_t, kLineBytes> data);

    /// Merges a whole dirty page (DRAM cache eviction path).
    EnqueueResult enqueuePage(std::uint64_t page_index, const Page& data);

    /// Removes and returns the named entry; PageAbsent when missing.
    Entry take(std::uint64_t page_index);

    /// Removes and returns the FIFO-oldest entry.
    Entry takeOldest();

    const std::deque<Entry>& entries() const { return entries_; }

  private:
    Entry* find(std::uint64_t page_index);
    const Entry* find(std::uint64_t page_index) const;
    EnqueueResult allocate(Entry entry);

    std::uint32_t capacity_;
    std::deque<Entry> entries_; // front = oldest
};

} // namespace nvsim

#endif
