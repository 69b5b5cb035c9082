"""Finite classical bit commitment with public coins, audited exactly.

The model: a commit phase of N rounds and a reveal phase of M rounds. In
each round the committer speaks, the receiver answers, then one public coin
lands. Private randomness, alphabets, and round counts are finite and
small, and every protocol function is a lookup table, so consistency,
certificate membership, and both cheating values are computed by exhaustive
enumeration in exact rational arithmetic. There is no tolerance anywhere in
this module; the theorem it checks has equality cases.

The audit itself: let p_u be the probability, over everyone's randomness,
that an honest commitment to bit u could later be certified as the other
bit against every consistent receiver. Committing to a uniform bit and
certifying the flip when possible gives the committer 1/2 + (p0 + p1)/4;
guessing the committed bit from certificate membership gives the receiver
1 - (p0 + p1)/4. The two values sum to exactly 3/2, so one of them is at
least 3/4, whatever the tables are.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Union

from .errors import (
    CrossCheckError,
    InvariantViolationError,
    NotHonestTranscriptError,
    OutOfRangeError,
    StrategySpaceTooLargeError,
)

MAX_SYMBOLS = 4
MAX_RANDOMNESS = 16
DEFAULT_STRATEGY_CAP = 1 << 24

Transcript = tuple[int, ...]


def transcript_key(transcript: Transcript) -> str:
    return ",".join(str(v) for v in transcript)


def parse_transcript_key(key: str) -> Transcript:
    return tuple(int(v) for v in key.split(","))


def coin_bits(index: int, rounds: int) -> tuple[int, ...]:
    """Per-round public coins of a coin-vector index, round 1 first."""
    return tuple((index >> i) & 1 for i in range(rounds))


def mixed_radix_encode(digits: Transcript, radices: Transcript) -> int:
    index = 0
    weight = 1
    for digit, radix in zip(digits, radices, strict=True):
        if not 0 <= digit < radix:
            raise OutOfRangeError(f"digit {digit!r} outside alphabet of size {radix!r}")
        index += digit * weight
        weight *= radix
    return index


def mixed_radix_decode(index: int, radices: Transcript) -> Transcript:
    digits = []
    for radix in radices:
        index, digit = divmod(index, radix)
        digits.append(digit)
    return tuple(digits)


def interleave(messages: Transcript, coins: Transcript) -> Transcript:
    out: list[int] = []
    for i, coin in enumerate(coins):
        out.extend(messages[2 * i : 2 * i + 2])
        out.append(coin)
    return tuple(out)


@dataclass(frozen=True)
class AuditReport:
    """Exact cheating values of the two canonical strategies.

    ``p0`` and ``p1`` are the flip-certification probabilities; the
    committer and receiver values are determined by them and must sum to
    exactly 3/2.
    """

    p0: Fraction
    p1: Fraction
    committer_value: Fraction
    receiver_value: Fraction
    total: Fraction

    def __post_init__(self):
        half = Fraction(1, 2)
        quarter_mass = (self.p0 + self.p1) / 4
        if self.committer_value != half + quarter_mass:
            raise CrossCheckError(
                "committer_value", float(self.committer_value), float(half + quarter_mass)
            )
        if self.receiver_value != 1 - quarter_mass:
            raise CrossCheckError(
                "receiver_value", float(self.receiver_value), float(1 - quarter_mass)
            )
        if self.total != Fraction(3, 2):
            raise CrossCheckError("audit_total", float(self.total), 1.5)
        if max(self.committer_value, self.receiver_value) < Fraction(3, 4):
            raise CrossCheckError(
                "audit_floor",
                float(max(self.committer_value, self.receiver_value)),
                0.75,
            )


@dataclass(frozen=True, eq=False)
class ClassicalProtocol:
    """A fully tabulated commit-and-reveal protocol.

    ``commit_table[ra][rb][c][x]`` holds the commit-phase messages (committer
    then receiver, round by round, coins excluded); ``reveal_table`` maps an
    honest commit transcript key to ``[ra][rb][cp][y]`` reveal messages in
    the same layout; ``accept_table`` maps the key to ``[y][rb][td_index]``
    over the full reveal-transcript space. Construction enumerates the whole
    protocol once to verify completeness, message causality, and that the
    receiver's reveal replies ignore the committer's reveal messages. The
    last restriction is what makes the honest tables total: the receiver's
    behaviour against a cheating committer is then determined by them.
    """

    name: str
    commit_rounds: int
    reveal_rounds: int
    commit_alphabets: tuple[tuple[int, int], ...]
    reveal_alphabets: tuple[tuple[int, int], ...]
    ra_size: int
    rb_size: int
    commit_table: tuple
    reveal_table: dict
    accept_table: dict

    def __post_init__(self):
        self._validate_shape()
        object.__setattr__(self, "_honest_keys", {})
        object.__setattr__(self, "_consistent_rbs", {})
        object.__setattr__(self, "_membership", {})
        self._enumerate_honest()
        self._validate_tables()
        self._validate_commit_causality()
        self._validate_receiver_obliviousness()
        self._validate_reveal_causality()
        self._validate_completeness()

    # -- static structure ------------------------------------------------

    def _validate_shape(self) -> None:
        if self.commit_rounds < 1 or self.reveal_rounds < 1:
            raise OutOfRangeError("round counts must be at least 1")
        if not 1 <= self.ra_size <= MAX_RANDOMNESS or not 1 <= self.rb_size <= MAX_RANDOMNESS:
            raise OutOfRangeError(f"randomness sizes must lie in 1..{MAX_RANDOMNESS}")
        if len(self.commit_alphabets) != self.commit_rounds:
            raise InvariantViolationError("one commit alphabet pair per round required")
        if len(self.reveal_alphabets) != self.reveal_rounds:
            raise InvariantViolationError("one reveal alphabet pair per round required")
        for pair in self.commit_alphabets + self.reveal_alphabets:
            if len(pair) != 2 or any(not 1 <= size <= MAX_SYMBOLS for size in pair):
                raise OutOfRangeError(f"alphabet sizes must lie in 1..{MAX_SYMBOLS}: {pair!r}")

    @property
    def reveal_radices(self) -> Transcript:
        """Digit sizes of a full reveal transcript, round by round."""
        radices: list[int] = []
        for a_size, b_size in self.reveal_alphabets:
            radices.extend((a_size, b_size, 2))
        return tuple(radices)

    def reveal_transcript_index(self, td: Transcript) -> int:
        return mixed_radix_encode(td, self.reveal_radices)

    def reveal_transcript_from_index(self, index: int) -> Transcript:
        return mixed_radix_decode(index, self.reveal_radices)

    # -- table access ----------------------------------------------------

    def commit_messages(self, ra: int, rb: int, c_index: int, x: int) -> Transcript:
        return tuple(self.commit_table[ra][rb][c_index][x])

    def commit_transcript(self, ra: int, rb: int, c_index: int, x: int) -> Transcript:
        coins = coin_bits(c_index, self.commit_rounds)
        return interleave(self.commit_messages(ra, rb, c_index, x), coins)

    def reveal_messages(self, key: str, ra: int, rb: int, cp_index: int, y: int) -> Transcript:
        try:
            rows = self.reveal_table[key]
        except KeyError:
            raise NotHonestTranscriptError(f"no reveal rows for transcript {key!r}") from None
        return tuple(rows[ra][rb][cp_index][y])

    def reveal_transcript(self, key: str, ra: int, rb: int, cp_index: int, y: int) -> Transcript:
        coins = coin_bits(cp_index, self.reveal_rounds)
        return interleave(self.reveal_messages(key, ra, rb, cp_index, y), coins)

    def receiver_reply(self, key: str, rb: int, y: int, round_index: int, coin_prefix: Transcript) -> int:
        """The receiver's reveal message for a round, off the honest table.

        Well defined for arbitrary committer behaviour because the replies
        were validated to depend only on what this signature carries.
        """
        cp_index = 0
        for i, coin in enumerate(coin_prefix):
            cp_index |= coin << i
        messages = self.reveal_messages(key, 0, rb, cp_index, y)
        return messages[2 * round_index + 1]

    def accepts(self, key: str, y: int, rb: int, td: Transcript) -> int:
        try:
            rows = self.accept_table[key]
        except KeyError:
            raise NotHonestTranscriptError(f"no acceptance rows for transcript {key!r}") from None
        return int(rows[y][rb][self.reveal_transcript_index(td)])

    def honest_runs(self) -> Iterator[tuple[int, int, int, int, Transcript]]:
        """Every (ra, rb, c_index, x, commit transcript) the protocol allows."""
        for ra in range(self.ra_size):
            for rb in range(self.rb_size):
                for c_index in range(1 << self.commit_rounds):
                    for x in (0, 1):
                        yield ra, rb, c_index, x, self.commit_transcript(ra, rb, c_index, x)

    # -- construction-time checks ----------------------------------------

    def _enumerate_honest(self) -> None:
        for ra, rb, c_index, x, transcript in self.honest_runs():
            messages = self.commit_messages(ra, rb, c_index, x)
            if len(messages) != 2 * self.commit_rounds:
                raise InvariantViolationError(
                    f"commit row for (ra={ra}, rb={rb}, c={c_index}, x={x}) has wrong length"
                )
            for i, (a_size, b_size) in enumerate(self.commit_alphabets):
                if not 0 <= messages[2 * i] < a_size or not 0 <= messages[2 * i + 1] < b_size:
                    raise OutOfRangeError(f"commit symbol outside alphabet in round {i + 1}")
            key = transcript_key(transcript)
            self._honest_keys.setdefault(key, []).append((ra, rb, c_index, x))
            self._consistent_rbs.setdefault(key, set()).add(rb)

    def _validate_tables(self) -> None:
        honest = set(self._honest_keys)
        if set(self.reveal_table) != honest:
            raise InvariantViolationError("reveal table keys do not match the honest transcripts")
        if set(self.accept_table) != honest:
            raise InvariantViolationError("acceptance table keys do not match the honest transcripts")
        space = 1
        for radix in self.reveal_radices:
            space *= radix
        for key in honest:
            for ra in range(self.ra_size):
                for rb in range(self.rb_size):
                    for cp_index in range(1 << self.reveal_rounds):
                        for y in (0, 1):
                            messages = self.reveal_messages(key, ra, rb, cp_index, y)
                            if len(messages) != 2 * self.reveal_rounds:
                                raise InvariantViolationError("reveal row has wrong length")
                            for i, (a_size, b_size) in enumerate(self.reveal_alphabets):
                                if not 0 <= messages[2 * i] < a_size or not 0 <= messages[2 * i + 1] < b_size:
                                    raise OutOfRangeError(
                                        f"reveal symbol outside alphabet in round {i + 1}"
                                    )
            rows = self.accept_table[key]
            for y in (0, 1):
                for rb in range(self.rb_size):
                    row = rows[y][rb]
                    if len(row) != space:
                        raise InvariantViolationError(
                            "acceptance row does not cover the reveal-transcript space"
                        )
                    if any(bit not in (0, 1) for bit in row):
                        raise InvariantViolationError("acceptance entries must be bits")

    def _validate_commit_causality(self) -> None:
        # The committer's message may depend on (ra, x, replies so far, coins
        # so far); the receiver's on (rb, committer messages up to now, coins
        # so far). Causal replies are also what makes a receiver consistent
        # with a transcript reproduce it against any committer that does.
        committer_view: dict = {}
        receiver_view: dict = {}
        for ra, rb, c_index, x, _ in self.honest_runs():
            messages = self.commit_messages(ra, rb, c_index, x)
            coins = coin_bits(c_index, self.commit_rounds)
            for i in range(self.commit_rounds):
                a_key = (ra, x, messages[1 : 2 * i : 2], coins[:i])
                b_key = (rb, messages[0 : 2 * i + 1 : 2], coins[:i])
                for view, key, value, who in (
                    (committer_view, a_key, messages[2 * i], "committer"),
                    (receiver_view, b_key, messages[2 * i + 1], "receiver"),
                ):
                    seen = view.setdefault(key, value)
                    if seen != value:
                        raise InvariantViolationError(
                            f"{who} commit message in round {i + 1} is not a function of its view"
                        )

    def _validate_receiver_obliviousness(self) -> None:
        # b'_i must be determined by (rb, y, commit transcript, earlier
        # coins): the honest reveal table is consulted for the receiver's
        # reaction to cheating committers, which is only sound if his honest
        # replies never read the committer's reveal messages.
        for key in self.reveal_table:
            view: dict = {}
            for ra in range(self.ra_size):
                for rb in range(self.rb_size):
                    for cp_index in range(1 << self.reveal_rounds):
                        coins = coin_bits(cp_index, self.reveal_rounds)
                        for y in (0, 1):
                            messages = self.reveal_messages(key, ra, rb, cp_index, y)
                            for i in range(self.reveal_rounds):
                                reply_key = (rb, y, coins[:i])
                                value = messages[2 * i + 1]
                                seen = view.setdefault(reply_key, value)
                                if seen != value:
                                    raise InvariantViolationError(
                                        f"receiver reveal reply in round {i + 1} reads more than "
                                        "(randomness, claim, coins)"
                                    )

    def _validate_reveal_causality(self) -> None:
        for key in self.reveal_table:
            view: dict = {}
            for ra in range(self.ra_size):
                for rb in range(self.rb_size):
                    for cp_index in range(1 << self.reveal_rounds):
                        coins = coin_bits(cp_index, self.reveal_rounds)
                        for y in (0, 1):
                            messages = self.reveal_messages(key, ra, rb, cp_index, y)
                            for i in range(self.reveal_rounds):
                                a_key = (ra, y, messages[1 : 2 * i : 2], coins[:i])
                                value = messages[2 * i]
                                seen = view.setdefault(a_key, value)
                                if seen != value:
                                    raise InvariantViolationError(
                                        f"committer reveal message in round {i + 1} is not a "
                                        "function of its view"
                                    )

    def _validate_completeness(self) -> None:
        for ra, rb, c_index, x, transcript in self.honest_runs():
            key = transcript_key(transcript)
            for cp_index in range(1 << self.reveal_rounds):
                td = self.reveal_transcript(key, ra, rb, cp_index, x)
                if not self.accepts(key, x, rb, td):
                    raise InvariantViolationError(
                        f"honest run rejected: ra={ra} rb={rb} c={c_index} x={x} cp={cp_index}"
                    )

    # -- the audited quantities -------------------------------------------

    def _require_honest(self, transcript: Transcript) -> str:
        key = transcript_key(transcript)
        if key not in self._honest_keys:
            raise NotHonestTranscriptError(f"transcript {key!r} is not honestly producible")
        return key

    def consistent(self, rb: int, transcript: Transcript) -> int:
        """Whether a receiver holding ``rb`` could have seen this transcript."""
        key = self._require_honest(transcript)
        if not 0 <= rb < self.rb_size:
            raise OutOfRangeError(f"rb={rb!r} outside 0..{self.rb_size - 1}")
        return int(rb in self._consistent_rbs[key])

    def certifiable(
        self, transcript: Transcript, y: int, cap: int = DEFAULT_STRATEGY_CAP
    ) -> int:
        """Whether some deterministic reveal strategy opens ``y`` for sure.

        Searches every function from reveal-phase views (the receiver's
        replies and coins seen so far) to messages, and demands acceptance
        for every consistent receiver and every coin vector. Certificates
        are all or nothing; partial successes count for nothing here.
        """
        key = self._require_honest(transcript)
        if y not in (0, 1):
            raise OutOfRangeError(f"y={y!r} not a bit")
        cached = self._membership.get((key, y))
        if cached is not None:
            return cached

        rbs = sorted(self._consistent_rbs[key])
        rounds = self.reveal_rounds
        opponents = []
        for rb in rbs:
            for cp_index in range(1 << rounds):
                coins = coin_bits(cp_index, rounds)
                replies = self.reveal_messages(key, 0, rb, cp_index, y)[1::2]
                opponents.append((rb, coins, replies))

        views: list[list] = [[] for _ in range(rounds)]
        for _, coins, replies in opponents:
            for i in range(rounds):
                view = (replies[:i], coins[:i])
                if view not in views[i]:
                    views[i].append(view)

        cells = [(i, view) for i in range(rounds) for view in views[i]]
        cell_radices = tuple(self.reveal_alphabets[i][0] for i, _ in cells)
        strategy_count = 1
        for radix in cell_radices:
            strategy_count *= radix
        if strategy_count > cap:
            raise StrategySpaceTooLargeError(
                f"{strategy_count} deterministic strategies exceed the cap {cap}"
            )

        verdict = 0
        for strategy_index in range(strategy_count):
            choice = dict(zip(cells, mixed_radix_decode(strategy_index, cell_radices)))
            survived = True
            for rb, coins, replies in opponents:
                messages: list[int] = []
                for i in range(rounds):
                    messages.append(choice[(i, (replies[:i], coins[:i]))])
                    messages.append(replies[i])
                if not self.accepts(key, y, rb, interleave(tuple(messages), coins)):
                    survived = False
                    break
            if survived:
                verdict = 1
                break
        self._membership[(key, y)] = verdict
        return verdict

    def audit(self, cap: int = DEFAULT_STRATEGY_CAP) -> AuditReport:
        """Exact values of both canonical cheats, with the 3/2 identity.

        The committer's route is counted directly (commit to a uniform bit,
        open the demanded one when a certificate exists) and so is the
        receiver's (guess from certificate membership), then both are
        checked against their closed forms in p0 and p1.
        """
        denominator = self.ra_size * self.rb_size * (1 << self.commit_rounds)
        flip_counts = [0, 0]
        committer_wins = Fraction(0)
        receiver_wins = Fraction(0)
        for u in (0, 1):
            for ra in range(self.ra_size):
                for rb in range(self.rb_size):
                    for c_index in range(1 << self.commit_rounds):
                        transcript = self.commit_transcript(ra, rb, c_index, u)
                        own = self.certifiable(transcript, u, cap)
                        if not own:
                            raise InvariantViolationError(
                                "honest transcript lost its own certificate"
                            )
                        flipped = self.certifiable(transcript, 1 - u, cap)
                        flip_counts[u] += flipped
                        # Demanded bit is uniform: honest opening always
                        # works, the flip needs the certificate.
                        committer_wins += Fraction(1 + flipped, 2)
                        # Membership in both certificate sets hides u.
                        receiver_wins += Fraction(1, 2) if flipped else Fraction(1)

        p0 = Fraction(flip_counts[0], denominator)
        p1 = Fraction(flip_counts[1], denominator)
        committer_value = committer_wins / (2 * denominator)
        receiver_value = receiver_wins / (2 * denominator)
        if committer_value != Fraction(1, 2) + (p0 + p1) / 4:
            raise CrossCheckError(
                "committer_enumeration",
                float(committer_value),
                float(Fraction(1, 2) + (p0 + p1) / 4),
            )
        if receiver_value != 1 - (p0 + p1) / 4:
            raise CrossCheckError(
                "receiver_enumeration", float(receiver_value), float(1 - (p0 + p1) / 4)
            )
        return AuditReport(
            p0=p0,
            p1=p1,
            committer_value=committer_value,
            receiver_value=receiver_value,
            total=committer_value + receiver_value,
        )

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "N": self.commit_rounds,
            "M": self.reveal_rounds,
            "alphabets": {
                "commit": [list(pair) for pair in self.commit_alphabets],
                "reveal": [list(pair) for pair in self.reveal_alphabets],
            },
            "ra_size": self.ra_size,
            "rb_size": self.rb_size,
            "t_c_table": _nested_list(self.commit_table),
            "t_d_table": {key: _nested_list(rows) for key, rows in self.reveal_table.items()},
            "acc_table": {key: _nested_list(rows) for key, rows in self.accept_table.items()},
        }


def _nested_list(value):
    if isinstance(value, (list, tuple)):
        return [_nested_list(item) for item in value]
    return value


def _nested_tuple(value):
    if isinstance(value, (list, tuple)):
        return tuple(_nested_tuple(item) for item in value)
    return value


def protocol_from_dict(payload: dict) -> ClassicalProtocol:
    try:
        alphabets = payload["alphabets"]
        return ClassicalProtocol(
            name=str(payload.get("name", "unnamed")),
            commit_rounds=int(payload["N"]),
            reveal_rounds=int(payload["M"]),
            commit_alphabets=_nested_tuple(alphabets["commit"]),
            reveal_alphabets=_nested_tuple(alphabets["reveal"]),
            ra_size=int(payload["ra_size"]),
            rb_size=int(payload["rb_size"]),
            commit_table=_nested_tuple(payload["t_c_table"]),
            reveal_table={key: _nested_tuple(rows) for key, rows in payload["t_d_table"].items()},
            accept_table={key: _nested_tuple(rows) for key, rows in payload["acc_table"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvariantViolationError(f"malformed protocol table: {exc}") from exc


def save_protocol(proto: ClassicalProtocol, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(proto.to_json_dict(), indent=1, sort_keys=True))


def load_protocol(path: Union[str, Path]) -> ClassicalProtocol:
    return protocol_from_dict(json.loads(Path(path).read_text()))
