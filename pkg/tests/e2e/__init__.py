# Tests end-to-end
