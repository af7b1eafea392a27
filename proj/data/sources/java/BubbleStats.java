class BubbleStats {
    static int sort(int[] xs) {
        int swaps = 0;
        int n = xs.length;
        for (int i = 0; i < n; i++) {
            for (int j = 0; j + 1 < n - i; j++) {
                if (xs[j] > xs[j + 1]) {
                    int t = xs[j];
                    xs[j] = xs[j + 1];
                    xs[j + 1] = t;
                    swaps++;
                }
            }
        }
        String msg = "swaps=" + swaps;
        System.out.println(msg);
        return swaps + xs[0];
    }
}
