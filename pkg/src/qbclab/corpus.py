"""Builders for a small corpus of classical commitment tables.

Each maker assembles one protocol from per-round message functions via
``tabulate`` and returns the fully validated table form. The corpus spans
the audit's behaviour space: both fully degenerate extremes, coin-driven
and receiver-driven partial binding, an asymmetric variant, and a protocol
whose reveal certificate only exists as a genuinely adaptive strategy.

The JSON copies bundled with the package are exactly what ``generate_all``
writes; ``bundled`` loads them back through the same validating loader used
for user-supplied files.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence, Union

from .classical import (
    ClassicalProtocol,
    Transcript,
    coin_bits,
    interleave,
    mixed_radix_decode,
    protocol_from_dict,
    save_protocol,
    transcript_key,
)

CommitterCommit = Callable[[int, int, int, Transcript, Transcript], int]
ReceiverCommit = Callable[[int, int, Transcript, Transcript], int]
CommitterReveal = Callable[[int, int, Transcript, int, Transcript, Transcript], int]
ReceiverReveal = Callable[[int, int, Transcript, int, Transcript], int]
Acceptor = Callable[[Transcript, Transcript, int, int], int]


def tabulate(
    name: str,
    commit_alphabets: Sequence[Sequence[int]],
    reveal_alphabets: Sequence[Sequence[int]],
    ra_size: int,
    rb_size: int,
    committer_commit: CommitterCommit,
    receiver_commit: ReceiverCommit,
    committer_reveal: CommitterReveal,
    receiver_reveal: ReceiverReveal,
    accept: Acceptor,
) -> ClassicalProtocol:
    """Evaluate round functions over their whole domain into lookup tables.

    Message functions see exactly the views the model grants them, so the
    resulting tables pass the construction-time causality checks whatever
    the callables do. The committer's commit view is (ra, x, replies so
    far, coins so far); the receiver's reveal view deliberately excludes
    the committer's reveal messages.
    """
    commit_rounds = len(commit_alphabets)
    reveal_rounds = len(reveal_alphabets)

    commit_rows = []
    honest: dict[str, Transcript] = {}
    for ra in range(ra_size):
        by_rb = []
        for rb in range(rb_size):
            by_coin = []
            for c_index in range(1 << commit_rounds):
                coins = coin_bits(c_index, commit_rounds)
                by_bit = []
                for x in (0, 1):
                    messages: list[int] = []
                    for i in range(commit_rounds):
                        a = committer_commit(ra, x, i, tuple(messages[1::2]), coins[:i])
                        messages.append(a)
                        b = receiver_commit(rb, i, tuple(messages[0::2]), coins[:i])
                        messages.append(b)
                    by_bit.append(tuple(messages))
                    transcript = interleave(tuple(messages), coins)
                    honest.setdefault(transcript_key(transcript), transcript)
                by_coin.append(tuple(by_bit))
            by_rb.append(tuple(by_coin))
        commit_rows.append(tuple(by_rb))
    commit_table = tuple(commit_rows)

    reveal_table = {}
    accept_table = {}
    td_radices: list[int] = []
    for a_size, b_size in reveal_alphabets:
        td_radices.extend((a_size, b_size, 2))
    td_space = 1
    for radix in td_radices:
        td_space *= radix
    for key, transcript in honest.items():
        rows = []
        for ra in range(ra_size):
            by_rb = []
            for rb in range(rb_size):
                by_coin = []
                for cp_index in range(1 << reveal_rounds):
                    coins = coin_bits(cp_index, reveal_rounds)
                    by_claim = []
                    for y in (0, 1):
                        messages = []
                        for i in range(reveal_rounds):
                            a = committer_reveal(
                                ra, y, transcript, i, tuple(messages[1::2]), coins[:i]
                            )
                            messages.append(a)
                            messages.append(receiver_reveal(rb, y, transcript, i, coins[:i]))
                        by_claim.append(tuple(messages))
                    by_coin.append(tuple(by_claim))
                by_rb.append(tuple(by_coin))
            rows.append(tuple(by_rb))
        reveal_table[key] = tuple(rows)

        verdicts = []
        for y in (0, 1):
            by_rb = []
            for rb in range(rb_size):
                row = []
                for td_index in range(td_space):
                    td = mixed_radix_decode(td_index, tuple(td_radices))
                    row.append(int(bool(accept(transcript, td, y, rb))))
                by_rb.append(tuple(row))
            verdicts.append(tuple(by_rb))
        accept_table[key] = tuple(verdicts)

    return ClassicalProtocol(
        name=name,
        commit_rounds=commit_rounds,
        reveal_rounds=reveal_rounds,
        commit_alphabets=tuple(tuple(pair) for pair in commit_alphabets),
        reveal_alphabets=tuple(tuple(pair) for pair in reveal_alphabets),
        ra_size=ra_size,
        rb_size=rb_size,
        commit_table=commit_table,
        reveal_table=reveal_table,
        accept_table=accept_table,
    )


def _silent(*_args) -> int:
    return 0


def _echo_claim(_ra, y, _tc, _i, _replies, _coins) -> int:
    return y


def make_nonbinding() -> ClassicalProtocol:
    """Commit says nothing; any claim can be echoed and is accepted."""
    return tabulate(
        "nonbinding",
        commit_alphabets=[(1, 1)],
        reveal_alphabets=[(2, 1)],
        ra_size=1,
        rb_size=1,
        committer_commit=_silent,
        receiver_commit=_silent,
        committer_reveal=_echo_claim,
        receiver_reveal=_silent,
        accept=lambda tc, td, y, rb: int(td[0] == y),
    )


def make_nonhiding() -> ClassicalProtocol:
    """Plaintext commit; acceptance pins the claim to the commit message."""
    return tabulate(
        "nonhiding",
        commit_alphabets=[(2, 1)],
        reveal_alphabets=[(2, 1)],
        ra_size=1,
        rb_size=1,
        committer_commit=lambda ra, x, i, replies, coins: x,
        receiver_commit=_silent,
        committer_reveal=_echo_claim,
        receiver_reveal=_silent,
        accept=lambda tc, td, y, rb: int(td[0] == y and tc[0] == y),
    )


def make_coin_masked() -> ClassicalProtocol:
    """Commit sends the bit xored with the first public coin.

    The coin is public, so this binds and hides nothing from the audit's
    receiver; it exercises coin plumbing through every table.
    """

    def committer(ra, x, i, replies, coins):
        return x ^ coins[0] if i == 1 else 0

    def accept(tc, td, y, rb):
        mask_ok = tc[3] == (y ^ tc[2])  # second-round message against first coin
        return int(td[0] == y and mask_ok)

    return tabulate(
        "coin_masked",
        commit_alphabets=[(1, 1), (2, 1)],
        reveal_alphabets=[(2, 1)],
        ra_size=1,
        rb_size=1,
        committer_commit=committer,
        receiver_commit=_silent,
        committer_reveal=_echo_claim,
        receiver_reveal=_silent,
        accept=accept,
    )


def make_coin_or_plain() -> ClassicalProtocol:
    """First coin decides: heads commits in plaintext, tails commits nothing."""

    def committer(ra, x, i, replies, coins):
        if i == 1 and coins[0] == 0:
            return x
        return 0

    def accept(tc, td, y, rb):
        if tc[2] == 0 and tc[3] != y:  # plaintext branch binds
            return 0
        return int(td[0] == y)

    return tabulate(
        "coin_or_plain",
        commit_alphabets=[(1, 1), (2, 1)],
        reveal_alphabets=[(2, 1)],
        ra_size=1,
        rb_size=1,
        committer_commit=committer,
        receiver_commit=_silent,
        committer_reveal=_echo_claim,
        receiver_reveal=_silent,
        accept=accept,
    )


def make_or_masked() -> ClassicalProtocol:
    """Asymmetric binding: zero commits to a wildcard, one tracks the coin.

    Committing to zero never binds; committing to one binds exactly when
    the first coin lands zero. The audit lands strictly between the
    balanced cases on both sides.
    """

    def committer(ra, x, i, replies, coins):
        if i != 1:
            return 0
        return 2 if x == 0 else coins[0]

    def accept(tc, td, y, rb):
        if td[0] != y:
            return 0
        mark, coin = tc[3], tc[2]
        if mark == 2:
            return 1
        if y == 1:
            return int(mark == coin)
        return int(mark == 1)

    return tabulate(
        "or_masked",
        commit_alphabets=[(1, 1), (3, 1)],
        reveal_alphabets=[(2, 1)],
        ra_size=1,
        rb_size=1,
        committer_commit=committer,
        receiver_commit=_silent,
        committer_reveal=_echo_claim,
        receiver_reveal=_silent,
        accept=accept,
    )


def make_bob_gated() -> ClassicalProtocol:
    """The receiver announces a lenience bit that gates the binding check.

    A lenient receiver (announced 1) absorbs either claim; a strict one
    pins the claim. The receiver's announcement makes exactly one receiver
    string consistent with each transcript, so the certificate search
    quantifies over a singleton.
    """

    def committer(ra, x, i, replies, coins):
        if i == 1:
            return 1 if x == 1 else replies[0]
        return 0

    def receiver(rb, i, sent, coins):
        return rb if i == 0 else 0

    def accept(tc, td, y, rb):
        lenient = tc[1]
        return int(td[0] == y and (y | lenient) == tc[3])

    return tabulate(
        "bob_gated",
        commit_alphabets=[(1, 2), (2, 1)],
        reveal_alphabets=[(2, 1)],
        ra_size=1,
        rb_size=2,
        committer_commit=committer,
        receiver_commit=receiver,
        committer_reveal=_echo_claim,
        receiver_reveal=_silent,
        accept=accept,
    )


def make_adaptive_reveal() -> ClassicalProtocol:
    """Empty commit, but the reveal answer must track a fresh challenge.

    The receiver's first reveal message is his private bit; acceptance
    wants the claim xored onto it in the second round. Only strategies
    that actually read the challenge survive, so the certificate search
    cannot get away with constant functions here.
    """

    def committer_reveal(ra, y, tc, i, replies, coins):
        return replies[0] ^ y if i == 1 else 0

    def receiver_reveal(rb, y, tc, i, coins):
        return rb if i == 0 else 0

    def accept(tc, td, y, rb):
        return int(td[3] == (td[1] ^ y))

    return tabulate(
        "adaptive_reveal",
        commit_alphabets=[(1, 1)],
        reveal_alphabets=[(1, 2), (2, 1)],
        ra_size=1,
        rb_size=2,
        committer_commit=_silent,
        receiver_commit=_silent,
        committer_reveal=committer_reveal,
        receiver_reveal=receiver_reveal,
        accept=accept,
    )


MAKERS: dict[str, Callable[[], ClassicalProtocol]] = {
    "nonbinding": make_nonbinding,
    "nonhiding": make_nonhiding,
    "coin_masked": make_coin_masked,
    "coin_or_plain": make_coin_or_plain,
    "or_masked": make_or_masked,
    "bob_gated": make_bob_gated,
    "adaptive_reveal": make_adaptive_reveal,
}


def generate_all(dest: Union[str, Path]) -> list[Path]:
    """Write every corpus table as JSON into ``dest``; returns the paths."""
    dest_dir = Path(dest)
    dest_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, maker in MAKERS.items():
        path = dest_dir / f"{name}.json"
        save_protocol(maker(), path)
        written.append(path)
    return written


def bundled(name: str) -> ClassicalProtocol:
    """Load one of the packaged tables through the validating loader."""
    if name not in MAKERS:
        raise KeyError(f"unknown bundled protocol {name!r}; have {sorted(MAKERS)}")
    payload = resources.files("qbclab").joinpath("protocols").joinpath(f"{name}.json").read_text()
    return protocol_from_dict(json.loads(payload))


def bundled_names() -> list[str]:
    return sorted(MAKERS)
