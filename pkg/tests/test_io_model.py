import pytest
from bitarray.util import zeros
from hypothesis import given, strategies as st

from src.io_model import IoStats, PagedArray, PagedMemory, RecordCodec
from src.utils.errors import (
    BadParameters, CapacityExhausted, InvalidPage, PageFileError, SizeMismatch,
)


class TestPagedMemory:
    def test_fresh_memory_has_no_pages_and_zero_counters(self, mem):
        assert mem.pages_in_use() == 0
        assert mem.io_stats() == IoStats(0, 0)
        assert mem.page_bits == 4096

    def test_alloc_counts_one_write_and_returns_zeroed_page(self, mem):
        page = mem.alloc_page()
        assert mem.io_stats() == IoStats(0, 1)
        image = mem.read_page(page)
        assert len(image) == 4096
        assert not image.any()
        assert mem.io_stats() == IoStats(1, 1)

    def test_write_then_read_returns_image(self, mem):
        page = mem.alloc_page()
        image = zeros(4096, endian='big')
        image[0] = 1
        image[4095] = 1
        mem.write_page(page, image)
        assert mem.read_page(page) == image
        assert mem.io_stats() == IoStats(1, 2)

    def test_read_returns_a_copy(self, mem):
        page = mem.alloc_page()
        image = mem.read_page(page)
        image[0] = 1
        assert not mem.peek_page(page).any()

    def test_peek_is_uncounted(self, mem):
        page = mem.alloc_page()
        mem.reset_stats()
        mem.peek_page(page)
        assert mem.io_stats() == IoStats(0, 0)

    def test_budget_exhausted(self):
        mem = PagedMemory(page_words=4, page_budget=2)
        mem.alloc_page()
        mem.alloc_page()
        with pytest.raises(CapacityExhausted):
            mem.alloc_page()

    def test_freed_page_is_reused_and_budget_tracks_live_pages(self):
        mem = PagedMemory(page_words=4, page_budget=1)
        page = mem.alloc_page()
        mem.free_page(page)
        assert mem.pages_in_use() == 0
        assert mem.alloc_page() == page

    def test_allocations_are_cumulative(self, mem):
        first = mem.alloc_page()
        mem.alloc_page()
        mem.free_page(first)
        mem.alloc_page()
        mem.reset_stats()
        assert mem.pages_in_use() == 2
        assert mem.allocations == 3

    def test_invalid_page(self, mem):
        with pytest.raises(InvalidPage):
            mem.read_page(0)
        page = mem.alloc_page()
        mem.free_page(page)
        with pytest.raises(InvalidPage):
            mem.read_page(page)

    def test_size_mismatch(self, mem):
        page = mem.alloc_page()
        with pytest.raises(SizeMismatch):
            mem.write_page(page, zeros(4095, endian='big'))

    def test_rejects_pages_smaller_than_lg_n(self):
        with pytest.raises(BadParameters):
            PagedMemory(page_words=16, n_max=1 << 20)
        PagedMemory(page_words=20, n_max=1 << 20)

    def test_save_and_load_round_trip(self, tmp_path):
        mem = PagedMemory(page_words=4)
        first = mem.alloc_page()
        second = mem.alloc_page()
        image = zeros(256, endian='big')
        image[7] = 1
        mem.write_page(second, image)
        mem.free_page(first)

        path = tmp_path / 'pages.empg'
        mem.save(path)
        loaded = PagedMemory.load(path)
        assert loaded.page_words == 4
        assert loaded.io_stats() == IoStats(0, 0)
        assert loaded.read_page(second) == image
        assert not loaded.read_page(first).any()

    def test_load_rejects_bad_magic(self, tmp_path):
        path = tmp_path / 'bad.empg'
        path.write_bytes(b'NOPE' + bytes(16))
        with pytest.raises(PageFileError):
            PagedMemory.load(path)

    def test_load_rejects_truncated_page(self, tmp_path):
        mem = PagedMemory(page_words=4)
        mem.alloc_page()
        path = tmp_path / 'pages.empg'
        mem.save(path)
        path.write_bytes(path.read_bytes()[:-1])
        with pytest.raises(PageFileError):
            PagedMemory.load(path)


class TestRecordCodec:
    def test_per_page(self):
        codec = RecordCodec((8, 4, 4, 16), 256)
        assert codec.record_bits == 32
        assert codec.per_page == 8

    def test_layout_is_msb_first(self):
        codec = RecordCodec((4, 4), 16)
        image = codec.pack([(0xA, 0x5)])
        assert image.to01() == '1010010100000000'

    def test_field_overflow(self):
        codec = RecordCodec((4, 4), 64)
        with pytest.raises(BadParameters):
            codec.pack([(16, 0)])

    def test_record_wider_than_page(self):
        with pytest.raises(BadParameters):
            RecordCodec((64, 64, 1), 128)

    @given(st.lists(st.tuples(st.integers(0, 2**13 - 1), st.integers(0, 2**19 - 1)), max_size=13))
    def test_unpack_inverts_pack(self, records):
        codec = RecordCodec((13, 19), 420)
        assert codec.unpack(codec.pack(records), len(records)) == records


class TestPagedArray:
    def make(self, mem, cached_tail=False):
        return PagedArray(mem, RecordCodec((8, 8), mem.page_bits), cached_tail=cached_tail)

    def test_per_page_and_page_count(self, small_mem):
        array = self.make(small_mem)
        assert array.per_page == 16
        array.extend([(i, i) for i in range(17)])
        assert len(array) == 17
        assert array.page_count == 2

    def test_extend_reports_completed_pages(self, small_mem):
        array = self.make(small_mem)
        assert array.extend([(1, 1)] * 10) == []
        completed = array.extend([(2, 2)] * 10)
        assert [page_no for page_no, _ in completed] == [0]
        assert completed[0][1] == [(1, 1)] * 10 + [(2, 2)] * 6

    def test_uncached_tail_is_written_through(self, small_mem):
        array = self.make(small_mem)
        array.extend([(1, 2)])
        assert small_mem.io_stats() == IoStats(0, 2)  # alloc + write
        array.extend([(3, 4)])
        assert small_mem.io_stats() == IoStats(1, 3)  # read tail + write
        assert array.read_all() == [(1, 2), (3, 4)]

    def test_cached_tail_writes_only_full_pages(self, small_mem):
        array = self.make(small_mem, cached_tail=True)
        for i in range(15):
            array.append((i, i))
        assert small_mem.io_stats() == IoStats(0, 0)
        array.append((15, 15))
        assert small_mem.io_stats() == IoStats(0, 2)
        assert array.read_record(3) == (3, 3)

    def test_evict_forces_tail_read(self, small_mem):
        array = self.make(small_mem, cached_tail=True)
        array.extend([(1, 1), (2, 2)])
        array.evict()
        small_mem.reset_stats()
        assert array.read_record(1) == (2, 2)
        assert small_mem.reads == 1
        array.append((3, 3))
        assert array.read_all() == [(1, 1), (2, 2), (3, 3)]

    def test_cache_avoids_repeat_reads(self, small_mem):
        array = self.make(small_mem)
        array.extend([(i, i) for i in range(32)])
        small_mem.reset_stats()
        cache = {}
        array.read_block(0, cache)
        array.read_block(0, cache)
        array.read_record(5, cache)
        assert small_mem.reads == 1

    def test_clear_frees_pages_truncate_keeps_them(self, small_mem):
        array = self.make(small_mem)
        array.extend([(i, i) for i in range(40)])
        assert small_mem.pages_in_use() == 3
        array.truncate()
        assert len(array) == 0
        assert small_mem.pages_in_use() == 3
        array.extend([(9, 9)])
        assert small_mem.pages_in_use() == 3
        array.clear()
        assert small_mem.pages_in_use() == 0

    def test_peek_all_matches_read_all_without_io(self, small_mem):
        array = self.make(small_mem, cached_tail=True)
        array.extend([(i, 255 - i) for i in range(20)])
        small_mem.reset_stats()
        assert array.peek_all() == [(i, 255 - i) for i in range(20)]
        assert small_mem.io_stats() == IoStats(0, 0)

    def test_attach_views_existing_pages(self, small_mem):
        array = self.make(small_mem)
        array.extend([(i, i) for i in range(20)])
        view = PagedArray.attach(small_mem, array.codec, array.page_ids, 20)
        assert view.read_all() == array.read_all()

    def test_out_of_range(self, small_mem):
        array = self.make(small_mem)
        with pytest.raises(IndexError):
            array.read_record(0)
