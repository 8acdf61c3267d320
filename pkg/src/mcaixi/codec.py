"""Fixed-width bit encodings for actions, observations and rewards.

Every symbol is written most-significant-bit first.  A percept is the
observation code followed by the offset reward code.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class CodecError(ValueError):
    """Raised when a symbol cannot be encoded or a bit string decoded."""


class MalformedPercept(CodecError):
    """A decoded reward lies outside the declared reward interval."""

    def __init__(self, obs: int, reward: int, message: str):
        super().__init__(message)
        self.obs = obs
        self.reward = reward


def int_to_bits(value: int, width: int) -> tuple[int, ...]:
    if value < 0 or value >= (1 << width):
        raise CodecError(f"{value} does not fit in {width} bits")
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def bits_to_int(bits) -> int:
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise CodecError(f"not a bit: {b!r}")
        value = (value << 1) | int(b)
    return value


@dataclass(frozen=True)
class SpaceSpec:
    """Sizes and bit widths of one domain's action and percept spaces."""

    action_count: int
    obs_count: int
    reward_min: int
    reward_max: int
    action_bits: int
    obs_bits: int
    reward_bits: int
    reward_offset: int

    def __post_init__(self):
        if self.action_count < 1 or self.obs_count < 1:
            raise ValueError("action and observation spaces must be non-empty")
        if min(self.action_bits, self.obs_bits, self.reward_bits) < 1:
            raise ValueError("bit widths must be positive")
        if (1 << self.action_bits) < self.action_count:
            raise ValueError("action_bits too small for action_count")
        if (1 << self.obs_bits) < self.obs_count:
            raise ValueError("obs_bits too small for obs_count")
        if self.reward_min > self.reward_max:
            raise ValueError("empty reward interval")
        lo = self.reward_min + self.reward_offset
        hi = self.reward_max + self.reward_offset
        if lo < 0 or hi >= (1 << self.reward_bits):
            raise ValueError("offset rewards do not fit in reward_bits")

    @property
    def percept_bits(self) -> int:
        return self.obs_bits + self.reward_bits

    @property
    def cycle_bits(self) -> int:
        return self.action_bits + self.percept_bits

    @property
    def reward_range(self) -> float:
        return float(self.reward_max - self.reward_min)

    def clamp_reward(self, reward: int) -> int:
        return min(max(reward, self.reward_min), self.reward_max)

    # percept symbols are the integer value of the concatenated bit code
    def percept_symbol(self, obs: int, reward: int) -> int:
        return bits_to_int(encode_percept(self, obs, reward))

    def split_symbol(self, symbol: int) -> tuple[int, int]:
        """Split a percept symbol into (observation, clamped raw reward)."""
        obs = symbol >> self.reward_bits
        code = symbol & ((1 << self.reward_bits) - 1)
        return obs, self.clamp_reward(code - self.reward_offset)


def encode_action(spec: SpaceSpec, action: int) -> tuple[int, ...]:
    if not 0 <= action < spec.action_count:
        raise CodecError(f"action {action} outside [0, {spec.action_count})")
    return int_to_bits(action, spec.action_bits)


def decode_action(spec: SpaceSpec, bits) -> int:
    if len(bits) != spec.action_bits:
        raise CodecError(f"expected {spec.action_bits} action bits, got {len(bits)}")
    action = bits_to_int(bits)
    if action >= spec.action_count:
        raise CodecError(f"decoded action {action} outside the action space")
    return action


def encode_percept(spec: SpaceSpec, obs: int, reward: int) -> tuple[int, ...]:
    # observations are range-checked against their bit width: some domains
    # (TicTacToe) use sparse observation codes
    if not 0 <= obs < (1 << spec.obs_bits):
        raise CodecError(f"observation {obs} does not fit in {spec.obs_bits} bits")
    if not spec.reward_min <= reward <= spec.reward_max:
        raise CodecError(
            f"reward {reward} outside [{spec.reward_min}, {spec.reward_max}]"
        )
    return int_to_bits(obs, spec.obs_bits) + int_to_bits(
        reward + spec.reward_offset, spec.reward_bits
    )


def decode_percept(spec: SpaceSpec, bits) -> tuple[int, int]:
    if len(bits) != spec.percept_bits:
        raise CodecError(f"expected {spec.percept_bits} percept bits, got {len(bits)}")
    obs = bits_to_int(bits[: spec.obs_bits])
    reward = bits_to_int(bits[spec.obs_bits :]) - spec.reward_offset
    if not spec.reward_min <= reward <= spec.reward_max:
        raise MalformedPercept(
            obs, reward,
            f"decoded reward {reward} outside [{spec.reward_min}, {spec.reward_max}]",
        )
    return obs, reward


@dataclass
class History:
    """The interaction string a1 x1 a2 x2 ... and its bit image."""

    spec: SpaceSpec
    symbols: list = field(default_factory=list)
    bits: list = field(default_factory=list)
    cycles: int = 0

    def append_action(self, action: int) -> None:
        if self.pending_action is not None:
            raise CodecError("history already ends in an action")
        self.symbols.append(("a", action))
        self.bits.extend(encode_action(self.spec, action))

    def append_percept(self, obs: int, reward: int) -> None:
        if self.pending_action is None:
            raise CodecError("a percept must follow an action")
        self.symbols.append(("x", (obs, reward)))
        self.bits.extend(encode_percept(self.spec, obs, reward))
        self.cycles += 1

    @property
    def pending_action(self):
        if self.symbols and self.symbols[-1][0] == "a":
            return self.symbols[-1][1]
        return None

    def __len__(self) -> int:
        return len(self.symbols)

    def rebuild_bits(self) -> list[int]:
        out: list[int] = []
        for kind, value in self.symbols:
            if kind == "a":
                out.extend(encode_action(self.spec, value))
            else:
                out.extend(encode_percept(self.spec, *value))
        return out
