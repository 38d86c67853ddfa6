from typing import Literal

import numpy as np
import numpy.typing as npt

type Symbol = str
type FloatArray = npt.NDArray[np.float64]
type IntArray = npt.NDArray[np.int64]
type Direction = Literal["ab", "ba"]
type DominanceCase = Literal["i", "ii", "iii"]
type SimMode = Literal["exact", "sampled"]
