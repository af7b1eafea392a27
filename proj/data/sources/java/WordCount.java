import java.util.HashMap;
import java.util.Map;

class WordCount {
    static Map<String, Integer> count(String text) {
        Map<String, Integer> counts = new HashMap<>();
        String[] words = text.split(" ");
        int total = 0;
        for (String w : words) {
            String key = w.toLowerCase();
            int seen = counts.getOrDefault(key, 0);
            counts.put(key, seen + 1);
            total += 1;
        }
        int distinct = counts.size();
        double ratio = total == 0 ? 0.0 : (double) distinct / total;
        System.out.println(ratio);
        return counts;
    }
}
