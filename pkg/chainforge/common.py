"""
@file: common.py
@time: 2026/10/17 17:50
@desc: shared instances for the command layer
"""

from chainforge.print_utils import *
from chainforge.error_utils import *
from chainforge.chain_utils import *
from chainforge.extension_utils import *
from chainforge.transfer_utils import *
from chainforge.setting_utils import *
from chainforge.io_utils import *
from chainforge.bound_utils import *
from chainforge.check_utils import *

# print_utils.Colored
color = Colored()

# print_utils tables
spectrum_table = DrawSpectrumTable()
residual_table = DrawResidualTable()
bounds_table = DrawBoundsTable()
check_table = DrawCheckTable()
