# [0, 1] followed by 2, 3, 4, ...
window 0 1
interval 0 1
tail uniform 1
