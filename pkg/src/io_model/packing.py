"""
Record Codec - Fixed-width bit packing of integer tuples into page images

A record is a tuple of non-negative integers with per-field bit widths. Records
are laid out back to back from the most significant end of the page; the slack
at the end of a page stays zero.
"""

from typing import List, Sequence, Tuple

from bitarray import bitarray
from bitarray.util import int2ba, ba2int

from ..utils.errors import BadParameters

Record = Tuple[int, ...]


class RecordCodec:
    """Pack and unpack fixed-width records into b-bit page images"""

    def __init__(self, widths: Sequence[int], page_bits: int):
        """
        Initialize codec

        Args:
            widths: Bit width of each record field (all >= 1)
            page_bits: b, bits per page image
        """
        if not widths or any(w < 1 for w in widths):
            raise BadParameters(f"record field widths must be positive, got {tuple(widths)}")

        self.widths = tuple(widths)
        self.page_bits = page_bits
        self.record_bits = sum(self.widths)
        if self.record_bits > page_bits:
            raise BadParameters(f"record of {self.record_bits} bits does not fit a {page_bits}-bit page")

        self.per_page = page_bits // self.record_bits
        self._record_mask = (1 << self.record_bits) - 1
        # (shift, mask) per field, most significant field first
        self._fields = []
        shift = self.record_bits
        for width in self.widths:
            shift -= width
            self._fields.append((shift, (1 << width) - 1))

    def __repr__(self) -> str:
        return f"RecordCodec(widths={self.widths}, per_page={self.per_page})"

    def pack_record(self, record: Record) -> int:
        value = 0
        for field, width in zip(record, self.widths):
            if field >> width:
                raise BadParameters(f"field value {field} does not fit in {width} bits")
            value = (value << width) | field
        return value

    def unpack_record(self, value: int) -> Record:
        return tuple((value >> shift) & mask for shift, mask in self._fields)

    def pack(self, records: Sequence[Record]) -> bitarray:
        """Pack up to per_page records into one page image"""
        if len(records) > self.per_page:
            raise BadParameters(f"{len(records)} records exceed {self.per_page} per page")

        value = 0
        for record in records:
            value = (value << self.record_bits) | self.pack_record(record)
        value <<= self.page_bits - len(records) * self.record_bits
        return int2ba(value, length=self.page_bits, endian='big')

    def unpack(self, image: bitarray, count: int) -> List[Record]:
        """Unpack the first `count` records of a page image"""
        value = ba2int(image)
        record_bits = self.record_bits
        mask = self._record_mask
        shift = self.page_bits - record_bits
        records = []
        for _ in range(count):
            records.append(self.unpack_record((value >> shift) & mask))
            shift -= record_bits
        return records
