import io
from pathlib import Path
from typing import Dict, List, TextIO, Tuple, Union

import numpy as np
from pydantic import BaseModel, validator

from ..pydantic_utils import FrozenConfig, readonly

__all__ = ['SdpProblem', 'SdpBuilder']

OBJECTIVE = 0


class SdpProblem(BaseModel):
    """
    maximize <C, X>  s.t.  <A_i, X> = b_i (i = 1..n_constraints),  X = diag(X_1, ..., X_B) PSD.

    The data matrices are stored as one list of upper-triangular entries (SDPA convention): entry `t` belongs to
    matrix `matrix[t]` (0 is the objective C, i >= 1 is A_i), block `block[t]` and position `(row[t], col[t])` with
    `row <= col`, all 0-based. An off-diagonal entry v stands for v at (row, col) and at (col, row), so it contributes
    2·v·X[row, col] to the inner product.
    """
    class Config(FrozenConfig):
        pass

    block_sizes: Tuple[int, ...]
    rhs: np.ndarray
    matrix: np.ndarray
    block: np.ndarray
    row: np.ndarray
    col: np.ndarray
    value: np.ndarray

    @validator('rhs', 'value', pre=True)
    def to_float_array(cls, v):
        return readonly(v)

    @validator('matrix', 'block', 'row', 'col', pre=True)
    def to_int_array(cls, v):
        return readonly(v, dtype=np.int64)

    @validator('block_sizes')
    def check_sizes(cls, v):
        if not v or min(v) < 1:
            raise ValueError('every block needs dimension >= 1')
        return v

    @validator('value')
    def check_entries(cls, v, values):
        if any(key not in values for key in ('block_sizes', 'rhs', 'matrix', 'block', 'row', 'col')):
            return v
        rhs, matrix, block, row, col = (values[key] for key in ('rhs', 'matrix', 'block', 'row', 'col'))
        if not (len(matrix) == len(block) == len(row) == len(col) == len(v)):
            raise ValueError('entry arrays differ in length')
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(rhs))):
            raise ValueError('problem data must be finite')
        if len(v) == 0:
            return v
        sizes = np.array(values['block_sizes'])
        if matrix.min() < 0 or matrix.max() > len(rhs):
            raise ValueError('matrix index out of range')
        if block.min() < 0 or block.max() >= len(sizes):
            raise ValueError('block index out of range')
        if row.min() < 0 or np.any(col >= sizes[block]) or np.any(row > col):
            raise ValueError('entries must lie in the upper triangle of their block')
        return v

    @property
    def n_constraints(self) -> int:
        return len(self.rhs)

    def entries(self, matrix: int):
        """(block, row, col, value) arrays of one data matrix."""
        mask = self.matrix == matrix
        return self.block[mask], self.row[mask], self.col[mask], self.value[mask]

    def objective_value(self, blocks: List[np.ndarray]) -> float:
        return self._inner(OBJECTIVE, blocks)

    def residuals(self, blocks: List[np.ndarray]) -> np.ndarray:
        """<A_i, X> - b_i for all constraints."""
        return np.array([self._inner(i, blocks) for i in range(1, self.n_constraints + 1)]) - self.rhs

    def _inner(self, matrix, blocks):
        block, row, col, value = self.entries(matrix)
        weights = np.where(row == col, 1., 2.)
        return float(sum(w * v * blocks[b][r, c] for b, r, c, v, w in zip(block, row, col, value, weights)))

    def to_sdpa(self, target: Union[str, Path, TextIO], comment: str = None):
        """
        Writes SDPA sparse format. Our maximization form is SDPA's dual problem, so F0 = C, F_i = A_i and the
        c vector is `rhs`. Indices are 1-based, blocks are listed in declaration order.
        """
        lines = []
        if comment:
            lines += [f'"{line}' for line in comment.splitlines()]
        lines.append(f'{self.n_constraints} = mDIM')
        lines.append(f'{len(self.block_sizes)} = nBLOCK')
        lines.append(' '.join(str(s) for s in self.block_sizes) + ' = bLOCKsTRUCT')
        lines.append(' '.join(repr(float(b)) for b in self.rhs))
        order = np.lexsort((self.col, self.row, self.block, self.matrix))
        for t in order:
            lines.append(f'{self.matrix[t]} {self.block[t] + 1} {self.row[t] + 1} {self.col[t] + 1} '
                         f'{float(self.value[t])!r}')
        text = '\n'.join(lines) + '\n'
        if isinstance(target, (str, Path)):
            with open(target, 'w') as f:
                f.write(text)
        else:
            target.write(text)

    @classmethod
    def from_sdpa(cls, source: Union[str, Path, TextIO]) -> 'SdpProblem':
        """Parses SDPA sparse format (comments start with `"` or `*`; `{}(),=` act as separators)."""
        if isinstance(source, (str, Path)):
            if not Path(source).is_file():
                raise FileNotFoundError("File {} not found".format(source))
            with open(source, 'r') as f:
                text = f.read()
        else:
            text = source.read()
        tokens_per_line = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line[0] in '"*':
                continue
            for separator in '{}(),':
                line = line.replace(separator, ' ')
            # trailing labels such as "= mDIM"
            tokens_per_line.append(line.split('=')[0].split())
        tokens_per_line = [t for t in tokens_per_line if t]
        n_constraints = int(tokens_per_line[0][0])
        n_blocks = int(tokens_per_line[1][0])
        header = [token for tokens in tokens_per_line[2:] for token in tokens]
        # negative sizes denote diagonal blocks in SDPA; they are stored as full blocks here
        block_sizes = tuple(abs(int(s)) for s in header[:n_blocks])
        rhs = [float(b) for b in header[n_blocks:n_blocks + n_constraints]]
        body = np.array(header[n_blocks + n_constraints:], dtype=np.float64).reshape(-1, 5)
        matrix, block, row, col = (body[:, i].astype(np.int64) for i in range(4))
        row, col = np.minimum(row, col), np.maximum(row, col)
        return cls(block_sizes=block_sizes, rhs=rhs, matrix=matrix, block=block - 1, row=row - 1, col=col - 1,
                   value=body[:, 4])

    def to_sdpa_string(self, comment: str = None) -> str:
        buffer = io.StringIO()
        self.to_sdpa(buffer, comment=comment)
        return buffer.getvalue()


class SdpBuilder:
    """
    Collects an `SdpProblem` term by term. Coefficients passed to `add` and `add_objective` multiply the single
    matrix entry X[i, j]; the symmetric SDPA storage is taken care of in `build`.
    """
    def __init__(self, block_sizes):
        self.block_sizes = tuple(int(s) for s in block_sizes)
        self.rhs: List[float] = []
        self._terms: Dict[Tuple[int, int, int, int], float] = {}

    def constraint(self, rhs: float) -> int:
        """Opens a new equality constraint and returns its (1-based) matrix id."""
        self.rhs.append(float(rhs))
        return len(self.rhs)

    def add(self, constraint: int, block: int, i: int, j: int, coefficient: float):
        i, j = min(i, j), max(i, j)
        if not 0 <= block < len(self.block_sizes) or not 0 <= i <= j < self.block_sizes[block]:
            raise IndexError(f'entry ({i}, {j}) outside block {block} of sizes {self.block_sizes}')
        value = coefficient if i == j else coefficient / 2
        key = (constraint, block, i, j)
        self._terms[key] = self._terms.get(key, 0.) + value

    def add_objective(self, block: int, i: int, j: int, coefficient: float):
        self.add(OBJECTIVE, block, i, j, coefficient)

    def equate(self, block: int, first: Tuple[int, int], second: Tuple[int, int]):
        """X[first] - X[second] = 0."""
        constraint = self.constraint(0.)
        self.add(constraint, block, *first, 1.)
        self.add(constraint, block, *second, -1.)

    def build(self) -> SdpProblem:
        items = sorted((key, value) for key, value in self._terms.items() if value != 0.)
        keys = np.array([key for key, _ in items], dtype=np.int64).reshape(-1, 4)
        return SdpProblem(block_sizes=self.block_sizes, rhs=np.array(self.rhs), matrix=keys[:, 0], block=keys[:, 1],
                          row=keys[:, 2], col=keys[:, 3], value=[value for _, value in items])
